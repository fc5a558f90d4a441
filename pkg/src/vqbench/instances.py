"""Problem graphs, cost-Hamiltonian encoders, and brute-force oracles.

Two problems are encoded over undirected simple graphs:

* graph coloring with ``k = 2**m`` colors: node v owns the m consecutive
  qubits ``v*m .. v*m + m - 1`` and its color is the big-endian value of that
  block. Each edge (v, w) contributes the penalty

      2**m * prod_{l=0}^{m-1} (1 + Z_{v,l} Z_{w,l})

  which is ``4**m`` when both endpoints carry the same block and 0 otherwise,
  so the total energy is ``4**m`` times the number of monochromatic edges.

* Max-Cut: qubit v encodes node v's side, each edge contributes
  ``1 - Z_v Z_w``, so the energy is exactly twice the cut size. Training
  minimizes the negated Hamiltonian.

Per-edge identity weight is attached to the first Pauli term emitted for that
edge (see :mod:`vqbench.hamiltonian`), keeping all coefficients integral and
partial-term energies exact.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Iterator, Literal

import numpy as np

from .hamiltonian import DiagonalHamiltonian, PauliTerm, index_to_bits

ORACLE_MAX_QUBITS = 24


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph: node count plus ordered edge list (u < v)."""

    n_nodes: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        norm = []
        seen = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ValueError(f"edge ({u},{v}) out of range for {self.n_nodes} nodes")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n_nodes, self.n_nodes), dtype=np.float64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    def bfs_order(self, start: int = 0) -> list[int]:
        """Breadth-first node order from ``start``; stranded components follow
        in index order."""
        seen = [False] * self.n_nodes
        adj = self.neighbors()
        order: list[int] = []
        queue: deque[int] = deque()
        for root in [start] + [v for v in range(self.n_nodes) if v != start]:
            if seen[root]:
                continue
            seen[root] = True
            queue.append(root)
            while queue:
                u = queue.popleft()
                order.append(u)
                for w in sorted(adj[u]):
                    if not seen[w]:
                        seen[w] = True
                        queue.append(w)
        return order

    def is_connected(self) -> bool:
        if self.n_nodes <= 1:
            return True
        adj = self.neighbors()
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == self.n_nodes

    def is_bipartite(self) -> bool:
        color = [-1] * self.n_nodes
        adj = self.neighbors()
        for root in range(self.n_nodes):
            if color[root] != -1:
                continue
            color[root] = 0
            queue = deque([root])
            while queue:
                u = queue.popleft()
                for w in adj[u]:
                    if color[w] == -1:
                        color[w] = 1 - color[u]
                        queue.append(w)
                    elif color[w] == color[u]:
                        return False
        return True


def gnp_random_graph(n: int, p: float, seed: int) -> Graph:
    """Seeded G(n, p) graph: each unordered pair (u < v, lexicographic order)
    is included independently with probability p.

    Uses the counter-based Philox generator keyed by ``seed``, so the same
    (n, p, seed) gives the same graph on any platform or process.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.append((u, v))
    return Graph(n, tuple(edges))


@dataclass(frozen=True)
class ProblemInstance:
    """A graph together with its encoded cost Hamiltonian."""

    graph: Graph
    kind: Literal["coloring", "maxcut"]
    hamiltonian: DiagonalHamiltonian
    qubit_layout: dict[int, tuple[int, ...]]
    colors: int | None = None
    name: str = ""

    @property
    def n_qubits(self) -> int:
        return self.hamiltonian.n_qubits

    def node_of_qubit(self) -> dict[int, int]:
        return {q: v for v, qs in self.qubit_layout.items() for q in qs}

    def training_hamiltonian(self) -> DiagonalHamiltonian:
        """The Hamiltonian a minimizer should descend on.

        Coloring is a penalty (minimum 0 at proper colorings); Max-Cut is a
        maximization, so its Hamiltonian is negated. Term order matches
        ``hamiltonian.terms``, so partition indices stay valid.
        """
        if self.kind == "maxcut":
            return -self.hamiltonian
        return self.hamiltonian

    @cached_property
    def oracle(self) -> "OracleReport":
        return brute_force_oracle(self)


@dataclass(frozen=True)
class OracleReport:
    """Exhaustive ground truth for one instance."""

    valid_count: int
    valid_ratio: float
    optimum_energy: float
    optimizer_args: frozenset[str]
    target_indices: tuple[int, ...] = field(repr=False, default=())

    def to_json_dict(self) -> dict:
        return {
            "valid_count": self.valid_count,
            "valid_ratio": self.valid_ratio,
            "optimum_energy": self.optimum_energy,
            "optimizer_args": sorted(self.optimizer_args),
        }


def coloring_hamiltonian(g: Graph, k: int, name: str = "") -> ProblemInstance:
    """Encode k-coloring of ``g`` (k a power of two) as a diagonal penalty."""
    if k < 2 or k & (k - 1):
        raise ValueError(f"color count must be a power of two >= 2, got {k}")
    m = k.bit_length() - 1
    n_qubits = g.n_nodes * m
    weight = float(2**m)
    terms = []
    for u, v in g.edges:
        first = True
        for subset in range(1, 2**m):
            support = []
            for l in range(m):
                if subset >> l & 1:
                    support.extend((u * m + l, v * m + l))
            share = weight if first else 0.0
            terms.append(PauliTerm(weight, tuple(support), identity_share=share))
            first = False
    layout = {v: tuple(range(v * m, (v + 1) * m)) for v in range(g.n_nodes)}
    h = DiagonalHamiltonian(n_qubits, tuple(terms))
    return ProblemInstance(g, "coloring", h, layout, colors=k, name=name)


def maxcut_hamiltonian(g: Graph, name: str = "") -> ProblemInstance:
    """Encode Max-Cut of ``g``; energy of a bitstring is twice its cut size."""
    terms = tuple(
        PauliTerm(-1.0, (u, v), identity_share=1.0) for u, v in g.edges
    )
    layout = {v: (v,) for v in range(g.n_nodes)}
    h = DiagonalHamiltonian(g.n_nodes, terms)
    return ProblemInstance(g, "maxcut", h, layout, name=name)


def decode_coloring(bits: str, m: int) -> list[int]:
    """Colors from a bitstring: node v's color is the big-endian value of its
    block of m bits (block l-th character = qubit ``v*m + l``)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if len(bits) % m:
        raise ValueError(f"bitstring length {len(bits)} not divisible by m={m}")
    colors = []
    for start in range(0, len(bits), m):
        block = bits[start : start + m]
        value = 0
        for b in block:
            value = value * 2 + (b == "1")
        colors.append(value)
    return colors


def encode_coloring(colors: list[int], m: int) -> str:
    """Inverse of :func:`decode_coloring`."""
    if any(not 0 <= c < 2**m for c in colors):
        raise ValueError(f"colors must lie in [0, {2**m})")
    return "".join(format(c, f"0{m}b") for c in colors)


def brute_force_oracle(instance: ProblemInstance) -> OracleReport:
    """Exhaustively enumerate the basis to report the instance's ground truth.

    For coloring the valid set is the zero-energy states; for Max-Cut it is
    the set of maximum-energy (maximum-cut) states.
    """
    n = instance.n_qubits
    if n > ORACLE_MAX_QUBITS:
        raise ValueError(
            f"brute-force oracle capped at {ORACLE_MAX_QUBITS} qubits, got {n}"
        )
    energies = instance.hamiltonian.diagonal
    dim = energies.size
    if instance.kind == "coloring":
        target = np.flatnonzero(energies == 0.0)
        satisfiable = target.size > 0
        if not satisfiable:
            target = np.flatnonzero(energies == energies.min())
        optimum = 0.0 if satisfiable else float(energies.min())
        valid_count = int(np.count_nonzero(energies == 0.0))
    else:
        optimum = float(energies.max())
        target = np.flatnonzero(energies == optimum)
        valid_count = int(target.size)
    args = frozenset(index_to_bits(int(z), n) for z in target)
    return OracleReport(
        valid_count=valid_count,
        valid_ratio=valid_count / dim,
        optimum_energy=optimum,
        optimizer_args=args,
        target_indices=tuple(int(z) for z in target),
    )


# ---------------------------------------------------------------------------
# Fixture graphs
# ---------------------------------------------------------------------------

def graph_to_text(g: Graph) -> str:
    lines = [str(g.n_nodes)] + [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    lines = [ln for ln in (s.strip() for s in text.splitlines()) if ln]
    if not lines:
        raise ValueError("empty graph file")
    n = int(lines[0])
    edges = []
    for ln in lines[1:]:
        u, v = ln.split()
        edges.append((int(u), int(v)))
    return Graph(n, tuple(edges))


def _fixture_root():
    return resources.files("vqbench") / "fixtures"


def list_fixture_ids() -> list[str]:
    root = _fixture_root()
    return sorted(
        p.name[: -len(".txt")] for p in root.iterdir() if p.name.endswith(".txt")
    )


def load_fixture_graph(fixture_id: str) -> Graph:
    path = _fixture_root() / f"{fixture_id}.txt"
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise KeyError(
            f"unknown fixture {fixture_id!r}; available: {list_fixture_ids()}"
        ) from None
    return graph_from_text(text)


def fixture_metadata() -> dict[str, dict]:
    """Sidecar metadata per fixture (generation parameters and the reference
    solution counts these instances were checked against)."""
    text = (_fixture_root() / "fixtures.json").read_text()
    return json.loads(text)


def generate_connected_graphs(
    n: int,
    p: float,
    count: int,
    seed_base: int = 0,
    require_bipartite: bool = False,
    max_tries: int = 10_000,
) -> Iterator[tuple[int, Graph]]:
    """Yield ``count`` connected (optionally bipartite) G(n, p) graphs.

    Seeds ``seed_base, seed_base + 1, ...`` are tried in order and yielded
    with the accepted graph, so a fixed seed_base gives a fixed instance set.
    """
    found = 0
    for seed in range(seed_base, seed_base + max_tries):
        g = gnp_random_graph(n, p, seed)
        if not g.is_connected():
            continue
        if require_bipartite and not g.is_bipartite():
            continue
        yield seed, g
        found += 1
        if found == count:
            return
    raise RuntimeError(
        f"could not find {count} matching graphs within {max_tries} seeds"
    )
