"""Dense statevector simulation of parameterized circuits.

Conventions (identical across the package):

* Amplitudes are stored in natural binary order; qubit 0 is the least
  significant bit of the basis index, so basis integer z has qubit q's bit at
  ``(z >> q) & 1``.
* Bitstring keys place qubit q at character q (see :mod:`vqbench.hamiltonian`).
* Rotation gates follow the half-angle convention, e.g.
  ``RY(theta) = exp(-i * theta * Y / 2)``. A gate's effective angle is
  ``scale * params[param_index]``, which lets several gates share one trainable
  parameter (as the cost blocks of a QAOA circuit do).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hamiltonian import DiagonalHamiltonian, expectation_exact, index_to_bits

MAX_QUBITS = 24
ROTATION_KINDS = ("rx", "ry", "rz")
GATE_KINDS = ("h", "rx", "ry", "rz", "cnot", "cz")

_H_MATRIX = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)


@dataclass(frozen=True)
class Gate:
    """One circuit element; rotation kinds carry a parameter slot."""

    kind: str
    target: int
    control: int | None = None
    param_index: int | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        is_rotation = self.kind in ROTATION_KINDS
        if is_rotation != (self.param_index is not None):
            raise ValueError(
                f"{self.kind} gate must carry a parameter slot iff it is a rotation"
            )
        needs_control = self.kind in ("cnot", "cz")
        if needs_control != (self.control is not None):
            raise ValueError(f"{self.kind} gate control qubit mismatch")
        if self.control is not None and self.control == self.target:
            raise ValueError("control and target must differ")


@dataclass(frozen=True)
class ParamCircuit:
    """Ordered gate list with trainable rotation angles.

    ``layer_boundaries[i]`` is the gate index where layer i starts; the list
    is strictly increasing and starts at 0.
    """

    n_qubits: int
    gates: tuple[Gate, ...]
    n_params: int
    layer_boundaries: tuple[int, ...] = (0,)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must lie in [1, {MAX_QUBITS}]")
        used = set()
        for g in self.gates:
            qubits = (g.target,) if g.control is None else (g.target, g.control)
            if any(not 0 <= q < self.n_qubits for q in qubits):
                raise ValueError(f"gate {g} addresses a qubit outside the register")
            if g.param_index is not None:
                if not 0 <= g.param_index < self.n_params:
                    raise ValueError(f"parameter slot {g.param_index} out of range")
                used.add(g.param_index)
        if len(used) != self.n_params:
            missing = sorted(set(range(self.n_params)) - used)
            raise ValueError(f"parameter slots never used by any gate: {missing}")
        bounds = tuple(self.layer_boundaries)
        if not bounds or bounds[0] != 0 or any(
            b <= a for a, b in zip(bounds, bounds[1:])
        ):
            raise ValueError("layer_boundaries must be strictly increasing from 0")
        if bounds[-1] > len(self.gates):
            raise ValueError("layer boundary beyond the gate list")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "layer_boundaries", bounds)

    @property
    def n_layers(self) -> int:
        return len(self.layer_boundaries)

    def layer_param_indices(self, layer: int) -> tuple[int, ...]:
        """Parameter slots used by the gates of one layer."""
        start = self.layer_boundaries[layer]
        stop = (
            self.layer_boundaries[layer + 1]
            if layer + 1 < len(self.layer_boundaries)
            else len(self.gates)
        )
        slots = {
            g.param_index for g in self.gates[start:stop] if g.param_index is not None
        }
        return tuple(sorted(slots))

    def to_json_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "n_params": self.n_params,
            "layer_boundaries": list(self.layer_boundaries),
            "gates": [
                {
                    "kind": g.kind,
                    "target": g.target,
                    "control": g.control,
                    "param_index": g.param_index,
                    "scale": g.scale,
                }
                for g in self.gates
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict())


def zero_state(n_qubits: int) -> np.ndarray:
    state = np.zeros(1 << n_qubits, dtype=np.complex128)
    state[0] = 1.0
    return state


def _check_state(state: np.ndarray, n_qubits: int) -> np.ndarray:
    sv = np.asarray(state, dtype=np.complex128)
    if sv.shape != (1 << n_qubits,):
        raise ValueError(f"statevector must have {1 << n_qubits} amplitudes")
    norm = float(np.sum(np.abs(sv) ** 2))
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"statevector not normalized: sum |a|^2 = {norm}")
    return sv


def _apply_single(state: np.ndarray, u: np.ndarray, q: int, n: int) -> np.ndarray:
    # qubit q is bit q of the index: view as (high bits, bit q, low bits)
    view = state.reshape(-1, 2, 1 << q)
    a, b = view[:, 0, :], view[:, 1, :]
    out = np.empty_like(view)
    out[:, 0, :] = u[0, 0] * a + u[0, 1] * b
    out[:, 1, :] = u[1, 0] * a + u[1, 1] * b
    return out.reshape(-1)


def _rotation_matrix(kind: str, angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    if kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "ry":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    raise ValueError(kind)


@lru_cache(maxsize=256)
def _bit(n_states: int, q: int) -> np.ndarray:
    mask = (np.arange(n_states) >> q) & 1
    mask.flags.writeable = False
    return mask


@lru_cache(maxsize=64)
def _cnot_permutation(n_states: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(n_states)
    perm = np.where((idx >> control) & 1 == 1, idx ^ (1 << target), idx)
    perm.flags.writeable = False
    return perm


@lru_cache(maxsize=128)
def _z_sign(n_states: int, q: int) -> np.ndarray:
    sign = 1.0 - 2.0 * ((np.arange(n_states) >> q) & 1)
    sign.flags.writeable = False
    return sign


def run_circuit(
    c: ParamCircuit,
    params: np.ndarray,
    initial: np.ndarray | None = None,
) -> np.ndarray:
    """Apply the circuit's gates in order; returns a fresh statevector."""
    return _run_with_offsets(c, params, None, initial)


def _run_with_offsets(
    c: ParamCircuit,
    params: np.ndarray,
    angle_offsets: dict[int, float] | None,
    initial: np.ndarray | None = None,
) -> np.ndarray:
    theta = np.asarray(params, dtype=np.float64)
    if theta.shape != (c.n_params,):
        raise ValueError(f"expected {c.n_params} parameters, got shape {theta.shape}")
    if initial is None:
        state = zero_state(c.n_qubits)
    else:
        state = _check_state(initial, c.n_qubits).copy()
    n = c.n_qubits
    dim = state.size
    for gi, g in enumerate(c.gates):
        if g.kind == "h":
            state = _apply_single(state, _H_MATRIX, g.target, n)
            continue
        if g.kind == "cnot":
            state = state[_cnot_permutation(dim, g.control, g.target)]
            continue
        if g.kind == "cz":
            new = state.copy()
            new[(_bit(dim, g.control) & _bit(dim, g.target)) == 1] *= -1.0
            state = new
            continue
        angle = g.scale * theta[g.param_index]
        if angle_offsets and gi in angle_offsets:
            angle += angle_offsets[gi]
        if g.kind == "rz":
            # exp(-i angle/2) on bit 0, exp(+i angle/2) on bit 1
            half = angle / 2.0
            phase = math.cos(half) - 1j * math.sin(half) * _z_sign(dim, g.target)
            state = state * phase
        else:
            state = _apply_single(state, _rotation_matrix(g.kind, angle), g.target, n)
    return np.ascontiguousarray(state)


def sample_indices(
    state: np.ndarray, shots: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw basis-state indices; returns (unique indices, counts)."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = np.abs(state) ** 2
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    draws = np.searchsorted(cdf, rng.random(shots), side="right")
    return np.unique(draws, return_counts=True)


def sample(state: np.ndarray, shots: int, seed: int) -> dict[str, int]:
    """Seeded multinomial sampling of the measurement distribution."""
    n_qubits = int(np.asarray(state).size).bit_length() - 1
    sv = _check_state(state, n_qubits)
    rng = np.random.default_rng(seed)
    values, counts = sample_indices(sv, shots, rng)
    return {
        index_to_bits(int(z), n_qubits): int(c) for z, c in zip(values, counts)
    }


def param_shift_gradient(
    c: ParamCircuit, h: DiagonalHamiltonian, params: np.ndarray, i: int
) -> float:
    """Exact gradient of <H> with respect to parameter i via angle shifts.

    Every rotation gate bound to slot i is shifted by +/- pi/2 in its own
    angle; the two-point rule holds per gate because rotation generators have
    eigenvalues +/- 1/2, and gate scales multiply through by the chain rule.
    """
    if not 0 <= i < c.n_params:
        raise IndexError(f"parameter index {i} out of range for {c.n_params} slots")
    gate_ids = [gi for gi, g in enumerate(c.gates) if g.param_index == i]
    grad = 0.0
    for gi in gate_ids:
        scale = c.gates[gi].scale
        plus = expectation_exact(h, _run_with_offsets(c, params, {gi: math.pi / 2}))
        minus = expectation_exact(h, _run_with_offsets(c, params, {gi: -math.pi / 2}))
        grad += scale * (plus - minus) / 2.0
    return grad
