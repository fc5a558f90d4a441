"""Layered hardware-efficient circuit templates and the QAOA circuit.

Templates compose each layer from single-qubit rotation walls and a fixed
two-qubit entangler (ladder, ring, or all-pairs; CNOT or CZ). Templates
flagged ``identity_at_zero`` wrap the rotation walls inside an
entangler/inverse-entangler sandwich, so the whole layer reduces to the
identity when its angles are zero while still entangling for nonzero angles
(a CNOT-conjugated rotation acts on several qubits at once). The entangler
orientation alternates with the layer index so consecutive sandwiches do not
cancel. One template deliberately keeps the bare rotation-then-entangler
arrangement and is therefore *not* an identity at zero.

Parameter slots are assigned layer by layer, so the slots of layer l form the
contiguous block ``[l * k, (l + 1) * k)`` where k = rotations per layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import DiagonalHamiltonian
from .simulator import Gate, ParamCircuit


@dataclass(frozen=True)
class AnsatzTemplate:
    """Recipe for one layered circuit family."""

    id: str
    rotation_axes: tuple[str, ...]
    entangler: str  # "ladder" | "ring" | "full" | "none"
    entangler_gate: str  # "cnot" | "cz"
    identity_at_zero: bool

    def rotations_per_layer(self, n_qubits: int) -> int:
        return len(self.rotation_axes) * n_qubits


TEMPLATES: dict[str, AnsatzTemplate] = {
    t.id: t
    for t in (
        AnsatzTemplate("ry", ("ry",), "none", "cnot", True),
        AnsatzTemplate("ry_cnot_ladder", ("ry",), "ladder", "cnot", True),
        AnsatzTemplate("ry_cz_ring", ("ry",), "ring", "cz", True),
        AnsatzTemplate("rxrz_cz_ring", ("rx", "rz"), "ring", "cz", True),
        AnsatzTemplate("ry_cnot_full", ("ry",), "full", "cnot", True),
        AnsatzTemplate("ryrx_cnot_ladder", ("ry", "rx"), "ladder", "cnot", True),
        # bare rotation-then-ladder layers; not an identity at zero angles
        AnsatzTemplate("ry_cnot_stair", ("ry",), "ladder", "cnot", False),
    )
}


def get_template(template_id: str) -> AnsatzTemplate:
    try:
        return TEMPLATES[template_id]
    except KeyError:
        raise KeyError(
            f"unknown ansatz template {template_id!r}; available: {sorted(TEMPLATES)}"
        ) from None


def _entangler_pairs(kind: str, n_qubits: int, layer: int) -> list[tuple[int, int]]:
    """(control, target) pairs of one entangler layer; orientation flips on
    odd layers so consecutive sandwich layers do not cancel."""
    if kind == "none" or n_qubits < 2:
        return []
    if kind == "ladder":
        pairs = [(i, i + 1) for i in range(n_qubits - 1)]
    elif kind == "ring":
        pairs = []
        seen = set()
        for i in range(n_qubits):
            a, b = i, (i + 1) % n_qubits
            key = (min(a, b), max(a, b))
            if key not in seen:
                seen.add(key)
                pairs.append((a, b))
    elif kind == "full":
        pairs = [(i, j) for i in range(n_qubits) for j in range(i + 1, n_qubits)]
    else:
        raise ValueError(f"unknown entangler kind {kind!r}")
    if layer % 2:
        pairs = [(b, a) for a, b in reversed(pairs)]
    return pairs


def _entangler_gates(t: AnsatzTemplate, n_qubits: int, layer: int) -> list[Gate]:
    return [
        Gate(t.entangler_gate, target=b, control=a)
        for a, b in _entangler_pairs(t.entangler, n_qubits, layer)
    ]


def build_ansatz(t: AnsatzTemplate, n_qubits: int, layers: int) -> ParamCircuit:
    """Stack ``layers`` repetitions of the template's layer block.

    Parameter count is ``layers * rotations_per_layer``; layer l's slots are
    contiguous, which layer-wise training relies on.
    """
    if layers < 1:
        raise ValueError("layers must be >= 1")
    gates: list[Gate] = []
    boundaries: list[int] = []
    slot = 0
    for layer in range(layers):
        boundaries.append(len(gates))
        ent = _entangler_gates(t, n_qubits, layer)
        rotations = []
        for axis in t.rotation_axes:
            for q in range(n_qubits):
                rotations.append(Gate(axis, target=q, param_index=slot))
                slot += 1
        if t.identity_at_zero and ent:
            gates.extend(ent)
            gates.extend(rotations)
            gates.extend(reversed(ent))
        else:
            gates.extend(rotations)
            gates.extend(ent)
    return ParamCircuit(n_qubits, tuple(gates), slot, tuple(boundaries))


def prepend_ry_layer(c: ParamCircuit) -> ParamCircuit:
    """New circuit with one trainable RY per qubit in front.

    The new rotations take slots ``0..n_qubits-1``; the original circuit's
    slots shift up by ``n_qubits``.
    """
    n = c.n_qubits
    prologue = [Gate("ry", target=q, param_index=q) for q in range(n)]
    shifted = [
        Gate(
            g.kind,
            g.target,
            g.control,
            None if g.param_index is None else g.param_index + n,
            g.scale,
        )
        for g in c.gates
    ]
    boundaries = (0,) + tuple(b + n for b in c.layer_boundaries)
    return ParamCircuit(n, tuple(prologue + shifted), c.n_params + n, boundaries)


def _cost_block(h: DiagonalHamiltonian, gamma_slot: int) -> list[Gate]:
    """exp(-i * gamma * H) up to global phase, term by term.

    Multi-qubit Z terms become a CNOT parity chain around one RZ whose angle
    is ``2 * coeff * gamma``.
    """
    gates: list[Gate] = []
    for t in h.terms:
        s = t.z_support
        if not s:
            continue
        if len(s) == 1:
            gates.append(
                Gate("rz", target=s[0], param_index=gamma_slot, scale=2.0 * t.coefficient)
            )
            continue
        chain = [Gate("cnot", target=s[j + 1], control=s[j]) for j in range(len(s) - 1)]
        gates.extend(chain)
        gates.append(
            Gate("rz", target=s[-1], param_index=gamma_slot, scale=2.0 * t.coefficient)
        )
        gates.extend(reversed(chain))
    if not gates:
        # trivial cost function: bind the slot to a zero-effect rotation so
        # the circuit still exposes 2p parameters
        gates.append(Gate("rz", target=0, param_index=gamma_slot, scale=0.0))
    return gates


def qaoa_circuit_mixed(cost_hamiltonians) -> ParamCircuit:
    """QAOA-shaped circuit whose block i phase-separates its own Hamiltonian.

    Used by curriculum hybrids where deeper blocks see a more fully assembled
    cost function. All Hamiltonians must share the qubit count.
    """
    hs = list(cost_hamiltonians)
    if not hs:
        raise ValueError("need at least one cost block")
    n = hs[0].n_qubits
    if any(h.n_qubits != n for h in hs):
        raise ValueError("cost Hamiltonians must share one qubit count")
    gates: list[Gate] = [Gate("h", target=q) for q in range(n)]
    boundaries: list[int] = [0]
    for block, h in enumerate(hs):
        if block > 0:
            boundaries.append(len(gates))
        gates.extend(_cost_block(h, 2 * block))
        gates.extend(
            Gate("rx", target=q, param_index=2 * block + 1, scale=2.0) for q in range(n)
        )
    return ParamCircuit(n, tuple(gates), 2 * len(hs), tuple(boundaries))


def qaoa_circuit(h: DiagonalHamiltonian, p: int) -> ParamCircuit:
    """Hadamard wall followed by p alternating cost/mixer blocks.

    Parameters are ordered ``(gamma_1, beta_1, ..., gamma_p, beta_p)``; the
    mixer applies RX(2 * beta) on every qubit.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    return qaoa_circuit_mixed([h] * p)


def qaoa_initial_params(p: int) -> np.ndarray:
    """Annealing-style start values: gamma_i = i/p, beta_i = 1 - i/p."""
    if p < 1:
        raise ValueError("p must be >= 1")
    params = np.empty(2 * p, dtype=np.float64)
    for i in range(1, p + 1):
        params[2 * (i - 1)] = i / p
        params[2 * (i - 1) + 1] = 1.0 - i / p
    return params
