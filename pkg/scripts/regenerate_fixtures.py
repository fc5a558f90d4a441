"""Regenerate the shipped fixture graphs with networkx.

Requires networkx (a development-time dependency only; the committed fixture
files are what the package reads at runtime). The ten graphs are
``fast_gnp_random_graph(8, p, seed)`` draws with the (p, seed) pairs below;
the sidecar JSON records the generation parameters, the reference counts the
instances are checked against, and the solution counts actually computed from
the committed edge lists. Rows where the two disagree stem from a different
networkx random stream at the reference values' origin; the committed edge
lists are authoritative for all tests.

Run from the repository root:  python3 scripts/regenerate_fixtures.py
"""

from pathlib import Path
import json

import networkx as nx

from vqbench.instances import (
    Graph,
    brute_force_oracle,
    coloring_hamiltonian,
    graph_to_text,
    maxcut_hamiltonian,
)

# (fixture number, p, reference r %, reference s, reference optimal cut, seed)
ROWS = [
    (1, 0.30, 1.025, 672, 12, 7),
    (2, 0.55, 1.501, 984, 11, 8),
    (3, 0.40, 1.025, 672, 11, 9),
    (4, 0.40, 1.428, 936, 9, 10),
    (5, 0.35, 3.369, 2208, 9, 11),
    (6, 0.30, 2.051, 1344, 10, 12),
    (7, 0.35, 3.223, 2112, 10, 13),
    (8, 0.50, 0.879, 576, 10, 14),
    (9, 0.90, 0.037, 24, 15, 15),
    (10, 0.40, 0.659, 432, 12, 16),
]

N_NODES = 8
COLORS = 4


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "src" / "vqbench" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)
    meta = {}
    for num, p, ref_r, ref_s, ref_cut, seed in ROWS:
        g_nx = nx.fast_gnp_random_graph(N_NODES, p, seed=seed)
        graph = Graph(N_NODES, tuple(tuple(sorted(e)) for e in g_nx.edges()))
        name = f"graph_{num:02d}"
        (out / f"{name}.txt").write_text(graph_to_text(graph))

        coloring = brute_force_oracle(coloring_hamiltonian(graph, COLORS))
        cut = brute_force_oracle(maxcut_hamiltonian(graph))
        meta[name] = {
            "n_nodes": N_NODES,
            "p": p,
            "seed": seed,
            "generator": "networkx.fast_gnp_random_graph",
            "colors": COLORS,
            "reference": {"r_percent": ref_r, "s": ref_s, "optimal_cut": ref_cut},
            "computed": {
                "n_edges": graph.n_edges,
                "s": coloring.valid_count,
                "r_percent": round(100.0 * coloring.valid_ratio, 3),
                "optimal_cut": cut.optimum_energy / 2.0,
                "connected": graph.is_connected(),
            },
            "matches_reference": coloring.valid_count == ref_s,
        }
        flag = "match" if meta[name]["matches_reference"] else "DIFFERS"
        print(
            f"{name}: edges={graph.n_edges} s={coloring.valid_count} "
            f"(ref {ref_s}, {flag}) cut={cut.optimum_energy / 2.0:.0f} (ref {ref_cut})"
        )
    (out / "fixtures.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"wrote {len(ROWS)} fixtures to {out}")


if __name__ == "__main__":
    main()
