"""Diagonal cost Hamiltonians as weighted sums of Z-type Pauli terms.

A cost function over bitstrings is represented as

    H = constant_offset + sum_i  c_i * prod_{q in support_i} Z_q

where every Z_q is diagonal in the computational basis, so H assigns a real
energy to each basis state. Bitstrings use the convention that character ``i``
of the string is the bit of qubit ``i`` (qubit 0 first); a bit of 0 is the Z
eigenvalue +1, a bit of 1 is -1.

Identity weight is attributed per term: each :class:`PauliTerm` may carry an
``identity_share``, and a Hamiltonian's ``constant_offset`` is always the sum
of its terms' shares. Restricting to a subset of terms therefore restricts the
offset consistently, so energies of term-index partitions add up exactly to
the full energy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

OFFSET_ATOL = 1e-9
NORM_ATOL = 1e-10


@dataclass(frozen=True)
class PauliTerm:
    """One Z-type term: ``coefficient * prod_{q in z_support} Z_q``.

    ``identity_share`` is the slice of the owning Hamiltonian's constant
    offset attributed to this term (used when restricting to term subsets).
    """

    coefficient: float
    z_support: tuple[int, ...]
    identity_share: float = 0.0

    def __post_init__(self):
        support = tuple(sorted(int(q) for q in self.z_support))
        if len(set(support)) != len(support):
            raise ValueError(f"duplicate qubit in z_support {self.z_support}")
        if any(q < 0 for q in support):
            raise ValueError(f"negative qubit index in z_support {self.z_support}")
        if not math.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")
        object.__setattr__(self, "z_support", support)

    def eigenvalue(self, bits: str) -> int:
        """Z-product eigenvalue (+1/-1) of this term on a bitstring."""
        parity = sum(bits[q] == "1" for q in self.z_support) % 2
        return -1 if parity else 1


@dataclass(frozen=True)
class DiagonalHamiltonian:
    """Ordered sum of Z-type Pauli terms plus a constant offset.

    Term order is stable and meaningful: partition schedules refer to terms
    by index. If ``constant_offset`` is omitted it is derived as the sum of
    the terms' identity shares; if given it must match that sum.
    """

    n_qubits: int
    terms: tuple[PauliTerm, ...]
    constant_offset: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be non-negative")
        terms = tuple(self.terms)
        for i, t in enumerate(terms):
            if t.z_support and t.z_support[-1] >= self.n_qubits:
                raise ValueError(
                    f"term {i} acts on qubit {t.z_support[-1]} "
                    f"but Hamiltonian has {self.n_qubits} qubits"
                )
        share_sum = float(sum(t.identity_share for t in terms))
        if self.constant_offset is None:
            object.__setattr__(self, "constant_offset", share_sum)
        elif abs(self.constant_offset - share_sum) > OFFSET_ATOL:
            raise ValueError(
                f"constant_offset {self.constant_offset} does not match the "
                f"sum of term identity shares {share_sum}; attribute offsets "
                "to terms via identity_share"
            )
        object.__setattr__(self, "terms", terms)

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @cached_property
    def diagonal(self) -> np.ndarray:
        """Energies of all 2**n_qubits basis states, indexed by basis integer.

        Basis integer z has bit of qubit q at ``(z >> q) & 1``.
        """
        dim = 1 << self.n_qubits
        energies = np.full(dim, self.constant_offset, dtype=np.float64)
        idx = np.arange(dim, dtype=np.int64)
        for t in self.terms:
            signs = np.ones(dim, dtype=np.float64)
            for q in t.z_support:
                signs *= 1.0 - 2.0 * ((idx >> q) & 1)
            energies += t.coefficient * signs
        return energies

    def scaled(self, factor: float) -> "DiagonalHamiltonian":
        """Hamiltonian with every coefficient and identity share scaled."""
        return DiagonalHamiltonian(
            self.n_qubits,
            tuple(
                PauliTerm(factor * t.coefficient, t.z_support, factor * t.identity_share)
                for t in self.terms
            ),
        )

    def __neg__(self) -> "DiagonalHamiltonian":
        return self.scaled(-1.0)

    def to_json_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "offset": self.constant_offset,
            "terms": [
                {"coeff": t.coefficient, "qubits": list(t.z_support), "share": t.identity_share}
                for t in self.terms
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "DiagonalHamiltonian":
        terms = tuple(
            PauliTerm(float(t["coeff"]), tuple(t["qubits"]), float(t.get("share", 0.0)))
            for t in doc["terms"]
        )
        return cls(int(doc["n_qubits"]), terms, float(doc["offset"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def loads(cls, text: str) -> "DiagonalHamiltonian":
        return cls.from_json_dict(json.loads(text))


def bits_to_index(bits: str) -> int:
    """Basis integer for a bitstring (character i = bit of qubit i)."""
    return int(bits[::-1], 2) if bits else 0


def index_to_bits(z: int, n_qubits: int) -> str:
    """Bitstring of a basis integer (character i = bit of qubit i)."""
    return format(z, f"0{n_qubits}b")[::-1] if n_qubits else ""


def energy_of_basis_state(h: DiagonalHamiltonian, bits: str) -> float:
    """Energy H assigns to one computational basis state."""
    if len(bits) != h.n_qubits:
        raise ValueError(f"bitstring length {len(bits)} != n_qubits {h.n_qubits}")
    if any(b not in "01" for b in bits):
        raise ValueError(f"bitstring must contain only 0/1, got {bits!r}")
    total = h.constant_offset
    for t in h.terms:
        total += t.coefficient * t.eigenvalue(bits)
    return float(total)


def expectation_exact(h: DiagonalHamiltonian, amplitudes: np.ndarray) -> float:
    """<psi|H|psi> from a full statevector."""
    amps = np.asarray(amplitudes)
    if amps.shape != (1 << h.n_qubits,):
        raise ValueError(
            f"statevector has {amps.shape} amplitudes, expected {1 << h.n_qubits}"
        )
    probs = np.abs(amps) ** 2
    norm = float(probs.sum())
    if abs(norm - 1.0) > NORM_ATOL:
        raise ValueError(f"statevector is not normalized (sum of |a|^2 = {norm})")
    return float(probs @ h.diagonal)


def expectation_from_counts(h: DiagonalHamiltonian, counts: dict[str, int]) -> float:
    """Frequency-weighted mean energy over sampled bitstrings."""
    if not counts:
        raise ValueError("counts is empty")
    total_shots = sum(counts.values())
    if total_shots < 1:
        raise ValueError("total shot count must be >= 1")
    acc = 0.0
    for bits, c in counts.items():
        acc += c * energy_of_basis_state(h, bits)
    return acc / total_shots


def expectation_from_index_counts(
    h: DiagonalHamiltonian, indices: np.ndarray, counts: np.ndarray
) -> float:
    """Same as :func:`expectation_from_counts` for basis-integer count arrays."""
    total = int(counts.sum())
    if total < 1:
        raise ValueError("total shot count must be >= 1")
    return float(counts @ h.diagonal[indices]) / total


def partial_hamiltonian(h: DiagonalHamiltonian, indices) -> DiagonalHamiltonian:
    """Restriction of ``h`` to the given term indices (original order kept).

    The restricted offset is the sum of the selected terms' identity shares,
    so partial energies of a term partition add up exactly to the full energy.
    """
    index_list = sorted(set(int(i) for i in indices))
    if index_list and (index_list[0] < 0 or index_list[-1] >= h.n_terms):
        raise IndexError(
            f"term indices must lie in [0, {h.n_terms}), got {index_list[0]}..{index_list[-1]}"
        )
    return DiagonalHamiltonian(h.n_qubits, tuple(h.terms[i] for i in index_list))
