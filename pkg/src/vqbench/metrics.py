"""Solution-quality metrics computed from sampled measurement counts.

Two accuracy notions are tracked per optimization step: the probability mass
the sampled distribution puts on valid/optimal bitstrings (overall accuracy),
and whether the single most frequent bitstring is valid (most-likely-shot
accuracy, judged over a trailing window of steps). Max-Cut runs additionally
track the best cut seen among the sampled bitstrings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .hamiltonian import bits_to_index, index_to_bits
from .instances import OracleReport

if TYPE_CHECKING:  # pragma: no cover
    from .training import RunRecord


@dataclass(frozen=True)
class MetricSnapshot:
    """Per-iteration view of one training run's sampled output."""

    iteration: int
    loss: float
    overall_accuracy: float
    most_likely_bitstring: str
    most_likely_valid: bool
    best_cut_found: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "loss": self.loss,
            "overall_accuracy": self.overall_accuracy,
            "most_likely_bitstring": self.most_likely_bitstring,
            "most_likely_valid": self.most_likely_valid,
            "best_cut_found": self.best_cut_found,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "MetricSnapshot":
        return cls(
            iteration=int(doc["iteration"]),
            loss=float(doc["loss"]),
            overall_accuracy=float(doc["overall_accuracy"]),
            most_likely_bitstring=str(doc["most_likely_bitstring"]),
            most_likely_valid=bool(doc["most_likely_valid"]),
            best_cut_found=(
                None if doc["best_cut_found"] is None else int(doc["best_cut_found"])
            ),
        )


def overall_accuracy(counts: dict[str, int], oracle: OracleReport, kind: str) -> float:
    """Fraction of shots on valid (coloring) or optimal (Max-Cut) bitstrings."""
    if not counts:
        raise ValueError("counts is empty")
    total = sum(counts.values())
    if kind == "coloring" and oracle.optimum_energy != 0:
        return 0.0  # unsatisfiable instance: no zero-energy states exist
    hits = sum(c for bits, c in counts.items() if bits in oracle.optimizer_args)
    return hits / total


def _window_size(n: int, window_fraction: float) -> int:
    if not 0 < window_fraction <= 1:
        raise ValueError("window_fraction must lie in (0, 1]")
    return max(1, math.ceil(window_fraction * n))


def most_likely_accuracy(record: "RunRecord", window_fraction: float) -> float:
    """Fraction of trailing-window iterations whose modal bitstring is valid."""
    snaps = record.snapshots
    if not snaps:
        raise ValueError("run has no snapshots")
    w = _window_size(len(snaps), window_fraction)
    tail = snaps[-w:]
    return sum(s.most_likely_valid for s in tail) / len(tail)


def final_overall_accuracy(record: "RunRecord", window_fraction: float = 0.02) -> float:
    """Overall accuracy averaged over the trailing window of iterations."""
    snaps = record.snapshots
    if not snaps:
        raise ValueError("run has no snapshots")
    w = _window_size(len(snaps), window_fraction)
    tail = snaps[-w:]
    return sum(s.overall_accuracy for s in tail) / len(tail)


def energy_gap(
    record: "RunRecord", oracle: OracleReport, window_fraction: float = 0.02
) -> float:
    """Optimal cut minus the best cut sampled in the trailing window (cut units)."""
    snaps = record.snapshots
    if not snaps:
        raise ValueError("run has no snapshots")
    if any(s.best_cut_found is None for s in snaps):
        raise ValueError("energy_gap is defined for Max-Cut runs only")
    w = _window_size(len(snaps), window_fraction)
    best = max(s.best_cut_found for s in snaps[-w:])
    return oracle.optimum_energy / 2.0 - best


def build_snapshot(
    iteration: int,
    loss: float,
    values: np.ndarray,
    counts: np.ndarray,
    target_mask: np.ndarray,
    cut_diagonal: np.ndarray | None,
    n_qubits: int,
) -> MetricSnapshot:
    """Snapshot from one evaluation's sampled basis indices and counts.

    ``target_mask`` marks the valid/optimal basis states; ``cut_diagonal`` is
    the (positive) Max-Cut energy diagonal or None for coloring. Modal-count
    ties resolve to the lexicographically smallest bitstring.
    """
    total = int(counts.sum())
    acc = float(counts[target_mask[values]].sum()) / total
    top = counts.max()
    candidates = values[counts == top]
    modal_bits = min(index_to_bits(int(z), n_qubits) for z in candidates)
    modal_valid = bool(target_mask[bits_to_index(modal_bits)])
    best_cut = None
    if cut_diagonal is not None:
        best_cut = int(round(float(cut_diagonal[values].max()) / 2.0))
    return MetricSnapshot(
        iteration=iteration,
        loss=loss,
        overall_accuracy=acc,
        most_likely_bitstring=modal_bits,
        most_likely_valid=modal_valid,
        best_cut_found=best_cut,
    )
