"""Command-line entry point.

Subcommands: ``generate`` problem graphs, ``oracle`` brute-force reports,
``run`` an experiment matrix from a JSON config, ``summarize`` persisted
records into CSVs. ``run`` exits 0 only if every cell completed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import (
    ExperimentConfig,
    load_records,
    run_experiment,
    summarize_records,
)
from .instances import (
    brute_force_oracle,
    coloring_hamiltonian,
    generate_connected_graphs,
    gnp_random_graph,
    graph_from_text,
    graph_to_text,
    list_fixture_ids,
    load_fixture_graph,
    maxcut_hamiltonian,
)


def _cmd_generate(args) -> int:
    if args.connected or args.bipartite:
        found = generate_connected_graphs(
            args.nodes, args.p, args.count, args.seed, require_bipartite=args.bipartite
        )
        graphs = [(f"gnp{args.nodes}_p{args.p}_s{seed}", g) for seed, g in found]
    else:
        graphs = [
            (f"gnp{args.nodes}_p{args.p}_s{seed}", gnp_random_graph(args.nodes, args.p, seed))
            for seed in range(args.seed, args.seed + args.count)
        ]
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, g in graphs:
            (out / f"{name}.txt").write_text(graph_to_text(g))
            print(f"wrote {out / f'{name}.txt'} ({g.n_edges} edges)")
    else:
        for name, g in graphs:
            print(f"# {name}")
            sys.stdout.write(graph_to_text(g))
    return 0


def _cmd_oracle(args) -> int:
    if args.fixture:
        graph = load_fixture_graph(args.fixture)
    else:
        graph = graph_from_text(Path(args.graph).read_text())
    if args.problem == "coloring":
        instance = coloring_hamiltonian(graph, args.colors)
    else:
        instance = maxcut_hamiltonian(graph)
    report = brute_force_oracle(instance)
    doc = report.to_json_dict()
    if args.problem == "maxcut":
        doc["optimum_cut"] = report.optimum_energy / 2.0
    if not args.full:
        doc["optimizer_args"] = doc["optimizer_args"][: args.max_args]
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_run(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    if args.output_dir:
        cfg = ExperimentConfig.from_json_dict(
            {**json.loads(Path(args.config).read_text()), "output_dir": args.output_dir}
        )
    records, failures = run_experiment(cfg)
    print(f"completed {len(records)} run(s), {len(failures)} failure(s)")
    for cell, err in failures.items():
        print(f"  FAILED {cell}: {err}", file=sys.stderr)
    print(f"results under {cfg.output_dir}")
    return 1 if failures else 0


def _cmd_summarize(args) -> int:
    records = load_records(args.records)
    if not records:
        print(f"no records found under {args.records}", file=sys.stderr)
        return 1
    config_path = Path(args.records).parent / "config.json"
    if args.config:
        config_path = Path(args.config)
    cfg = ExperimentConfig.load(config_path)
    rows = summarize_records(records, cfg, args.out_dir or Path(args.records).parent)
    print(f"summarized {len(rows)} record(s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqbench",
        description="Variational quantum optimization workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate seeded random problem graphs")
    gen.add_argument("--nodes", type=int, required=True)
    gen.add_argument("--p", type=float, required=True)
    gen.add_argument("--seed", type=int, default=0, help="first seed to try")
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--connected", action="store_true", help="keep connected graphs only")
    gen.add_argument("--bipartite", action="store_true", help="keep bipartite graphs only")
    gen.add_argument("--out-dir", help="write graph files here instead of stdout")
    gen.set_defaults(func=_cmd_generate)

    orc = sub.add_parser("oracle", help="brute-force ground truth for one instance")
    src = orc.add_mutually_exclusive_group(required=True)
    src.add_argument("--fixture", help="shipped fixture id, e.g. graph_01")
    src.add_argument("--graph", help="path to a graph file")
    orc.add_argument("--problem", choices=("coloring", "maxcut"), required=True)
    orc.add_argument("--colors", type=int, default=4)
    orc.add_argument("--full", action="store_true", help="print every optimal bitstring")
    orc.add_argument("--max-args", type=int, default=16)
    orc.set_defaults(func=_cmd_oracle)

    run = sub.add_parser("run", help="run an experiment matrix from a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--output-dir", help="override the config's output_dir")
    run.set_defaults(func=_cmd_run)

    summ = sub.add_parser("summarize", help="rebuild CSV summaries from records")
    summ.add_argument("--records", required=True, help="directory of record JSON files")
    summ.add_argument("--config", help="config.json path (default: sibling of records)")
    summ.add_argument("--out-dir", help="where to write CSVs (default: records parent)")
    summ.set_defaults(func=_cmd_summarize)

    fixt = sub.add_parser("fixtures", help="list shipped fixture graph ids")
    fixt.set_defaults(func=lambda args: (print("\n".join(list_fixture_ids())), 0)[1])
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
