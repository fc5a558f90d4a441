"""Partition schedules over Hamiltonian term indices.

A schedule is an ordered partition ``P_1 .. P_M`` of (possibly overlapping)
term-index sets whose union covers every term, together with the cumulative
stage sets ``S_k = P_1 | ... | P_k``. Training against the growing ``S_k``
assembles the cost function from local pieces.

Strategy selection grammar (used by the CLI and method strings):
``rd:<m>`` random, ``sq:<m>`` sequential, ``cl:<m>`` k-means clustering,
``nw:<j>`` node-wise over j node groups.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.cluster import KMeans

from .instances import ProblemInstance


@dataclass(frozen=True)
class PartitionSchedule:
    """Ordered index sets plus their cumulative unions."""

    partitions: tuple[tuple[int, ...], ...]
    cumulative: tuple[tuple[int, ...], ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.partitions:
            raise ValueError("schedule needs at least one partition")
        parts = tuple(tuple(sorted(set(int(i) for i in p))) for p in self.partitions)
        if any(not p for p in parts):
            raise ValueError("empty partition in schedule")
        union: set[int] = set()
        cumulative = []
        for p in parts:
            union.update(p)
            cumulative.append(tuple(sorted(union)))
        if min(union) < 0 or union != set(range(max(union) + 1)):
            raise ValueError("partitions must cover a contiguous index range from 0")
        object.__setattr__(self, "partitions", parts)
        object.__setattr__(self, "cumulative", tuple(cumulative))

    @property
    def n_stages(self) -> int:
        return len(self.partitions)

    @property
    def n_terms(self) -> int:
        return len(self.cumulative[-1])


def _block_sizes(n: int, m: int) -> list[int]:
    base, extra = divmod(n, m)
    return [base + 1 if i < extra else base for i in range(m)]


def sequential_partition(n_terms: int, m: int) -> PartitionSchedule:
    """Contiguous order-preserving blocks of near-equal size."""
    if not 1 <= m <= n_terms:
        raise ValueError(f"partition count must lie in [1, {n_terms}], got {m}")
    parts = []
    start = 0
    for size in _block_sizes(n_terms, m):
        parts.append(tuple(range(start, start + size)))
        start += size
    return PartitionSchedule(tuple(parts))


def random_partition(n_terms: int, m: int, seed: int) -> PartitionSchedule:
    """Equally sized non-overlapping blocks of a seeded uniform shuffle."""
    if not 1 <= m <= n_terms:
        raise ValueError(f"partition count must lie in [1, {n_terms}], got {m}")
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    order = rng.permutation(n_terms)
    parts = []
    start = 0
    for size in _block_sizes(n_terms, m):
        parts.append(tuple(int(i) for i in order[start : start + size]))
        start += size
    return PartitionSchedule(tuple(parts))


def _terms_by_node_label(instance: ProblemInstance, labels: np.ndarray, n_groups: int):
    """Assign each term to the group of its lowest-indexed incident node."""
    node_of = instance.node_of_qubit()
    groups: list[list[int]] = [[] for _ in range(n_groups)]
    for idx, term in enumerate(instance.hamiltonian.terms):
        if term.z_support:
            node = min(node_of[q] for q in term.z_support)
            groups[int(labels[node])].append(idx)
        else:
            groups[0].append(idx)
    return groups


def kmeans_partition(instance: ProblemInstance, m: int, seed: int) -> PartitionSchedule:
    """Cluster nodes by their adjacency rows with seeded k-means, then assign
    each term to its lowest-indexed incident node's cluster.

    Clusters that receive no terms are dropped with a warning.
    """
    n_nodes = instance.graph.n_nodes
    if not 2 <= m <= n_nodes:
        raise ValueError(f"cluster count must lie in [2, {n_nodes}], got {m}")
    features = instance.graph.adjacency_matrix()
    model = KMeans(n_clusters=m, n_init=10, max_iter=300, random_state=int(seed))
    labels = model.fit_predict(features)
    groups = _terms_by_node_label(instance, labels, m)
    kept = [tuple(g) for g in groups if g]
    if len(kept) < len(groups):
        warnings.warn(
            f"k-means schedule dropped {len(groups) - len(kept)} empty partition(s); "
            f"{len(kept)} stage(s) remain",
            stacklevel=2,
        )
    return PartitionSchedule(tuple(kept))


def nodewise_partition(instance: ProblemInstance, j: int) -> PartitionSchedule:
    """Group nodes into j connected-leaning chunks of the BFS order from node
    0; stage g holds every term whose support touches group g's qubits.

    Partition overlap is expected: a term on an edge between two groups
    appears in both.
    """
    n_nodes = instance.graph.n_nodes
    if not 2 <= j <= n_nodes:
        raise ValueError(f"group count must lie in [2, {n_nodes}], got {j}")
    order = instance.graph.bfs_order(0)
    chunks: list[list[int]] = []
    start = 0
    for size in _block_sizes(n_nodes, j):
        chunks.append(order[start : start + size])
        start += size
    parts = []
    for chunk in chunks:
        qubits = {q for v in chunk for q in instance.qubit_layout[v]}
        members = [
            idx
            for idx, term in enumerate(instance.hamiltonian.terms)
            if (set(term.z_support) & qubits) or not term.z_support
        ]
        parts.append(tuple(members))
    return PartitionSchedule(tuple(parts))


def parse_strategy(spec: str, instance: ProblemInstance, seed: int) -> PartitionSchedule:
    """Build a schedule from a strategy string like ``nw:4`` or ``rd:2``."""
    try:
        code, count_text = spec.split(":")
        count = int(count_text)
    except ValueError:
        raise ValueError(
            f"bad strategy {spec!r}; expected rd:<m>, sq:<m>, cl:<m>, or nw:<j>"
        ) from None
    n_terms = instance.hamiltonian.n_terms
    if code == "sq":
        return sequential_partition(n_terms, count)
    if code == "rd":
        return random_partition(n_terms, count, seed)
    if code == "cl":
        return kmeans_partition(instance, count, seed)
    if code == "nw":
        return nodewise_partition(instance, count)
    raise ValueError(f"unknown strategy code {code!r} in {spec!r}")
