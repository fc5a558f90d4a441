"""Tests for the dense statevector simulator."""

import numpy as np
import pytest
from scipy import stats

from vqbench.hamiltonian import DiagonalHamiltonian, PauliTerm, expectation_exact
from vqbench.simulator import (
    Gate,
    ParamCircuit,
    param_shift_gradient,
    run_circuit,
    sample,
    sample_indices,
    zero_state,
)

INV_SQRT2 = 1 / np.sqrt(2)


def random_circuit(rng, max_qubits=10, max_gates=50) -> tuple[ParamCircuit, np.ndarray]:
    """Random circuit over the full gate set with one slot per rotation."""
    n = int(rng.integers(1, max_qubits + 1))
    n_gates = int(rng.integers(1, max_gates + 1))
    gates = []
    slot = 0
    for _ in range(n_gates):
        kind = rng.choice(["h", "rx", "ry", "rz", "cnot", "cz"] if n > 1 else ["h", "rx", "ry", "rz"])
        target = int(rng.integers(n))
        if kind in ("cnot", "cz"):
            control = int(rng.choice([q for q in range(n) if q != target]))
            gates.append(Gate(kind, target, control=control))
        elif kind == "h":
            gates.append(Gate(kind, target))
        else:
            gates.append(Gate(kind, target, param_index=slot))
            slot += 1
    circuit = ParamCircuit(n, tuple(gates), slot)
    params = rng.uniform(-np.pi, np.pi, size=slot)
    return circuit, params


def random_diagonal(rng, n_qubits) -> DiagonalHamiltonian:
    terms = []
    for _ in range(int(rng.integers(1, 5))):
        k = int(rng.integers(1, min(3, n_qubits) + 1))
        support = tuple(rng.choice(n_qubits, size=k, replace=False))
        terms.append(PauliTerm(float(rng.normal()), support))
    return DiagonalHamiltonian(n_qubits, tuple(terms))


class TestGateValidation:
    def test_rotation_needs_param(self):
        with pytest.raises(ValueError, match="rotation"):
            Gate("ry", 0)

    def test_fixed_gate_rejects_param(self):
        with pytest.raises(ValueError, match="rotation"):
            Gate("h", 0, param_index=0)

    def test_control_target_distinct(self):
        with pytest.raises(ValueError, match="differ"):
            Gate("cnot", 1, control=1)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown gate"):
            Gate("swap", 0)


class TestParamCircuitValidation:
    def test_unused_slot_rejected(self):
        with pytest.raises(ValueError, match="never used"):
            ParamCircuit(1, (Gate("ry", 0, param_index=0),), 2)

    def test_out_of_range_slot_rejected(self):
        with pytest.raises(ValueError, match="out of range"):
            ParamCircuit(1, (Gate("ry", 0, param_index=3),), 2)

    def test_boundaries_must_start_at_zero(self):
        with pytest.raises(ValueError, match="boundaries"):
            ParamCircuit(1, (Gate("h", 0),), 0, layer_boundaries=(1,))

    def test_layer_param_indices(self):
        gates = (
            Gate("ry", 0, param_index=0),
            Gate("ry", 1, param_index=1),
            Gate("ry", 0, param_index=2),
            Gate("ry", 1, param_index=3),
        )
        c = ParamCircuit(2, gates, 4, layer_boundaries=(0, 2))
        assert c.layer_param_indices(0) == (0, 1)
        assert c.layer_param_indices(1) == (2, 3)


class TestRunCircuit:
    def test_hadamard(self):
        c = ParamCircuit(1, (Gate("h", 0),), 0)
        assert np.allclose(run_circuit(c, []), [INV_SQRT2, INV_SQRT2])

    def test_ry_pi_flips(self):
        c = ParamCircuit(1, (Gate("ry", 0, param_index=0),), 1)
        out = run_circuit(c, [np.pi])
        assert abs(out[1]) == pytest.approx(1.0)

    def test_bell_state(self):
        c = ParamCircuit(2, (Gate("h", 0), Gate("cnot", 1, control=0)), 0)
        assert np.allclose(run_circuit(c, []), [INV_SQRT2, 0, 0, INV_SQRT2])

    def test_cnot_least_significant_bit_convention(self):
        # qubit 0 is the least significant index bit: X0 then CNOT(0 -> 1)
        # must map |00> to index 3
        c = ParamCircuit(
            2, (Gate("ry", 0, param_index=0), Gate("cnot", 1, control=0)), 1
        )
        out = run_circuit(c, [np.pi])
        assert abs(out[3]) == pytest.approx(1.0)

    def test_cz_phase(self):
        c = ParamCircuit(2, (Gate("h", 0), Gate("h", 1), Gate("cz", 1, control=0)), 0)
        out = run_circuit(c, [])
        assert np.allclose(out, [0.5, 0.5, 0.5, -0.5])

    def test_rz_phases(self):
        c = ParamCircuit(1, (Gate("h", 0), Gate("rz", 0, param_index=0)), 1)
        theta = 0.7
        out = run_circuit(c, [theta])
        expected = np.array(
            [np.exp(-1j * theta / 2), np.exp(1j * theta / 2)]
        ) * INV_SQRT2
        assert np.allclose(out, expected)

    def test_param_count_mismatch(self):
        c = ParamCircuit(1, (Gate("ry", 0, param_index=0),), 1)
        with pytest.raises(ValueError, match="parameters"):
            run_circuit(c, [0.1, 0.2])

    def test_initial_state_honored(self):
        c = ParamCircuit(1, (Gate("h", 0),), 0)
        one = np.array([0.0, 1.0], complex)
        out = run_circuit(c, [], initial=one)
        assert np.allclose(out, [INV_SQRT2, -INV_SQRT2])

    def test_initial_state_not_mutated(self):
        c = ParamCircuit(1, (Gate("h", 0),), 0)
        psi = np.array([0.0, 1.0], complex)
        run_circuit(c, [], initial=psi)
        assert np.array_equal(psi, [0.0, 1.0])

    def test_norm_preserved_on_random_circuits(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            circuit, params = random_circuit(rng)
            out = run_circuit(circuit, params)
            assert abs(np.linalg.norm(out) - 1.0) < 1e-9

    def test_gate_inverse_returns_input(self):
        rng = np.random.default_rng(9)
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi /= np.linalg.norm(psi)
        for kind in ("rx", "ry", "rz"):
            c = ParamCircuit(
                3,
                (Gate(kind, 1, param_index=0), Gate(kind, 1, param_index=1)),
                2,
            )
            out = run_circuit(c, [0.83, -0.83], initial=psi)
            assert np.max(np.abs(out - psi)) < 1e-10
        for kind in ("h", "cnot", "cz"):
            gate = Gate(kind, 1) if kind == "h" else Gate(kind, 1, control=0)
            c = ParamCircuit(3, (gate, gate), 0)
            out = run_circuit(c, [], initial=psi)
            assert np.max(np.abs(out - psi)) < 1e-10

    def test_scaled_rotation_angle(self):
        plain = ParamCircuit(1, (Gate("ry", 0, param_index=0),), 1)
        scaled = ParamCircuit(1, (Gate("ry", 0, param_index=0, scale=2.0),), 1)
        assert np.allclose(run_circuit(scaled, [0.4]), run_circuit(plain, [0.8]))


class TestSample:
    def test_point_mass(self):
        assert sample(zero_state(1), 200, seed=0) == {"0": 200}

    def test_determinism(self):
        sv = run_circuit(ParamCircuit(3, tuple(Gate("h", q) for q in range(3)), 0), [])
        assert sample(sv, 500, seed=7) == sample(sv, 500, seed=7)

    def test_counts_sum_to_shots(self):
        sv = run_circuit(ParamCircuit(2, (Gate("h", 0), Gate("h", 1)), 0), [])
        counts = sample(sv, 333, seed=1)
        assert sum(counts.values()) == 333

    def test_plus_state_frequency_bound(self):
        sv = run_circuit(ParamCircuit(1, (Gate("h", 0),), 0), [])
        shots = 100_000
        counts = sample(sv, shots, seed=11)
        assert 0.49 <= counts["0"] / shots <= 0.51  # 3 sigma ~ 0.0047

    def test_chi_square_goodness_of_fit(self):
        # uniform 4-qubit state, 1e5 shots, alpha = 0.001
        c = ParamCircuit(4, tuple(Gate("h", q) for q in range(4)), 0)
        sv = run_circuit(c, [])
        shots = 100_000
        values, counts = sample_indices(sv, shots, np.random.default_rng(21))
        observed = np.zeros(16)
        observed[values] = counts
        _, p_value = stats.chisquare(observed, np.full(16, shots / 16))
        assert p_value > 0.001

    def test_shots_must_be_positive(self):
        with pytest.raises(ValueError, match="shots"):
            sample(zero_state(1), 0, seed=0)


class TestParamShiftGradient:
    def test_ry_extremum(self):
        c = ParamCircuit(1, (Gate("ry", 0, param_index=0),), 1)
        h = DiagonalHamiltonian(1, (PauliTerm(1.0, (0,)),))
        assert param_shift_gradient(c, h, np.array([0.0]), 0) == pytest.approx(0.0)

    def test_ry_slope(self):
        c = ParamCircuit(1, (Gate("ry", 0, param_index=0),), 1)
        h = DiagonalHamiltonian(1, (PauliTerm(1.0, (0,)),))
        grad = param_shift_gradient(c, h, np.array([np.pi / 2]), 0)
        assert grad == pytest.approx(-1.0)

    def test_out_of_range_parameter(self):
        c = ParamCircuit(1, (Gate("ry", 0, param_index=0),), 1)
        h = DiagonalHamiltonian(1, (PauliTerm(1.0, (0,)),))
        with pytest.raises(IndexError):
            param_shift_gradient(c, h, np.array([0.0]), 1)

    def test_matches_finite_differences(self):
        # independent oracle: central differences on the exact expectation
        rng = np.random.default_rng(31)
        step = 1e-5
        for _ in range(50):
            circuit, params = random_circuit(rng, max_qubits=8, max_gates=30)
            if circuit.n_params == 0:
                continue
            h = random_diagonal(rng, circuit.n_qubits)
            i = int(rng.integers(circuit.n_params))
            grad = param_shift_gradient(circuit, h, params, i)
            up, down = params.copy(), params.copy()
            up[i] += step
            down[i] -= step
            fd = (
                expectation_exact(h, run_circuit(circuit, up))
                - expectation_exact(h, run_circuit(circuit, down))
            ) / (2 * step)
            assert grad == pytest.approx(fd, abs=1e-4)

    def test_shared_parameter_chain_rule(self):
        # one slot drives two scaled rotations; oracle is finite differences
        c = ParamCircuit(
            2,
            (
                Gate("ry", 0, param_index=0, scale=1.5),
                Gate("rx", 1, param_index=0, scale=-0.5),
            ),
            1,
        )
        h = DiagonalHamiltonian(2, (PauliTerm(1.0, (0, 1)),))
        theta = np.array([0.63])
        grad = param_shift_gradient(c, h, theta, 0)
        step = 1e-6
        fd = (
            expectation_exact(h, run_circuit(c, theta + step))
            - expectation_exact(h, run_circuit(c, theta - step))
        ) / (2 * step)
        assert grad == pytest.approx(fd, abs=1e-6)


def test_circuit_json_dump():
    c = ParamCircuit(2, (Gate("h", 0), Gate("ry", 1, param_index=0)), 1)
    doc = c.to_json_dict()
    assert doc["n_qubits"] == 2
    assert doc["gates"][1]["kind"] == "ry"
    assert doc["gates"][1]["param_index"] == 0
