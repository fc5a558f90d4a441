"""Tests for graph generation, problem encoders, oracles, and fixtures."""

import itertools

import numpy as np
import pytest

from vqbench.hamiltonian import energy_of_basis_state, index_to_bits
from vqbench.instances import (
    Graph,
    brute_force_oracle,
    coloring_hamiltonian,
    decode_coloring,
    encode_coloring,
    fixture_metadata,
    generate_connected_graphs,
    gnp_random_graph,
    graph_from_text,
    graph_to_text,
    list_fixture_ids,
    load_fixture_graph,
    maxcut_hamiltonian,
)

TRIANGLE = Graph(3, ((0, 1), (1, 2), (0, 2)))


def cut_size(g: Graph, bits: str) -> int:
    return sum(1 for u, v in g.edges if bits[u] != bits[v])


def monochromatic_edges(g: Graph, colors: list[int]) -> int:
    return sum(1 for u, v in g.edges if colors[u] == colors[v])


class TestGraph:
    def test_edges_normalized_and_sorted(self):
        g = Graph(3, ((2, 0), (1, 0)))
        assert g.edges == ((0, 1), (0, 2))

    def test_self_loop_rejected(self):
        with pytest.raises(ValueError, match="self-loop"):
            Graph(2, ((0, 0),))

    def test_duplicate_edge_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            Graph(3, ((0, 1), (1, 0)))

    def test_connectivity_and_bipartiteness(self):
        path = Graph(4, ((0, 1), (1, 2), (2, 3)))
        assert path.is_connected() and path.is_bipartite()
        assert TRIANGLE.is_connected() and not TRIANGLE.is_bipartite()
        split = Graph(4, ((0, 1), (2, 3)))
        assert not split.is_connected()


class TestGnpRandomGraph:
    def test_p_zero_is_empty(self):
        assert gnp_random_graph(4, 0.0, 1).edges == ()

    def test_p_one_is_complete(self):
        g = gnp_random_graph(4, 1.0, 1)
        assert g.n_edges == 6

    def test_determinism(self):
        a = gnp_random_graph(8, 0.5, 42)
        b = gnp_random_graph(8, 0.5, 42)
        assert a.edges == b.edges

    def test_different_seeds_differ(self):
        assert gnp_random_graph(8, 0.5, 1).edges != gnp_random_graph(8, 0.5, 2).edges

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            gnp_random_graph(0, 0.5, 1)
        with pytest.raises(ValueError):
            gnp_random_graph(3, 1.5, 1)


class TestColoringHamiltonian:
    def test_single_edge_two_colors(self):
        inst = coloring_hamiltonian(Graph(2, ((0, 1),)), 2)
        energies = {
            bits: energy_of_basis_state(inst.hamiltonian, bits)
            for bits in ("00", "01", "10", "11")
        }
        assert energies == {"00": 4.0, "01": 0.0, "10": 0.0, "11": 4.0}

    def test_empty_graph_is_zero_everywhere(self):
        inst = coloring_hamiltonian(Graph(3, ()), 4)
        assert all(inst.hamiltonian.diagonal == 0.0)

    def test_non_power_of_two_rejected(self):
        with pytest.raises(ValueError, match="power of two"):
            coloring_hamiltonian(TRIANGLE, 3)

    def test_qubit_layout(self):
        inst = coloring_hamiltonian(TRIANGLE, 4)
        assert inst.n_qubits == 6
        assert inst.qubit_layout == {0: (0, 1), 1: (2, 3), 2: (4, 5)}

    def test_term_count_bound(self):
        inst = coloring_hamiltonian(TRIANGLE, 4)
        assert inst.hamiltonian.n_terms <= TRIANGLE.n_edges * 4

    @pytest.mark.parametrize("k", [2, 4])
    def test_energy_counts_monochromatic_edges(self, k):
        # spectrum law checked exhaustively on random graphs
        m = k.bit_length() - 1
        for seed in range(20):
            g = gnp_random_graph(4 if k == 4 else 6, 0.5, seed)
            inst = coloring_hamiltonian(g, k)
            diag = inst.hamiltonian.diagonal
            for z in range(diag.size):
                bits = index_to_bits(z, inst.n_qubits)
                colors = decode_coloring(bits, m)
                assert diag[z] == (4**m) * monochromatic_edges(g, colors)

    def test_zero_energy_iff_proper_coloring(self):
        inst = coloring_hamiltonian(TRIANGLE, 4)
        diag = inst.hamiltonian.diagonal
        for z in range(64):
            colors = decode_coloring(index_to_bits(z, 6), 2)
            assert (diag[z] == 0) == (monochromatic_edges(TRIANGLE, colors) == 0)


class TestMaxcutHamiltonian:
    def test_single_edge(self):
        inst = maxcut_hamiltonian(Graph(2, ((0, 1),)))
        assert energy_of_basis_state(inst.hamiltonian, "01") == 2.0
        assert energy_of_basis_state(inst.hamiltonian, "00") == 0.0

    def test_triangle_max_energy(self):
        inst = maxcut_hamiltonian(TRIANGLE)
        assert inst.hamiltonian.diagonal.max() == 4.0

    def test_path_max_cut(self):
        path = Graph(3, ((0, 1), (1, 2)))
        inst = maxcut_hamiltonian(path)
        diag = inst.hamiltonian.diagonal
        assert diag.max() == 4.0
        best = {index_to_bits(z, 3) for z in np.flatnonzero(diag == 4.0)}
        assert best == {"010", "101"}

    @pytest.mark.parametrize("seed", range(5))
    def test_energy_is_twice_cut_exhaustive(self, seed):
        g = gnp_random_graph(7, 0.5, seed)
        diag = maxcut_hamiltonian(g).hamiltonian.diagonal
        for z in range(diag.size):
            assert diag[z] == 2 * cut_size(g, index_to_bits(z, 7))

    def test_training_hamiltonian_is_negated(self):
        inst = maxcut_hamiltonian(TRIANGLE)
        assert np.array_equal(
            inst.training_hamiltonian().diagonal, -inst.hamiltonian.diagonal
        )


class TestDecodeColoring:
    def test_examples(self):
        assert decode_coloring("0110", 2) == [1, 2]
        assert decode_coloring("00", 1) == [0, 0]

    def test_divisibility_enforced(self):
        with pytest.raises(ValueError, match="divisible"):
            decode_coloring("010", 2)

    def test_round_trip_all_two_node_colorings(self):
        for colors in itertools.product(range(4), repeat=2):
            assert decode_coloring(encode_coloring(list(colors), 2), 2) == list(colors)


class TestBruteForceOracle:
    def test_triangle_four_colors(self):
        report = brute_force_oracle(coloring_hamiltonian(TRIANGLE, 4))
        assert report.valid_count == 24  # 4*3*2 proper colorings
        assert report.valid_ratio == 24 / 64
        assert report.optimum_energy == 0.0

    def test_maxcut_triangle(self):
        report = brute_force_oracle(maxcut_hamiltonian(TRIANGLE))
        assert report.optimum_energy == 4.0
        assert len(report.optimizer_args) == 6  # every 2-1 split, both sides

    def test_unsatisfiable_coloring(self):
        report = brute_force_oracle(coloring_hamiltonian(TRIANGLE, 2))
        assert report.valid_count == 0
        assert report.optimum_energy > 0

    def test_capacity_error(self):
        big = coloring_hamiltonian(Graph(13, ((0, 1),)), 4)  # 26 qubits
        with pytest.raises(ValueError, match="capped"):
            brute_force_oracle(big)

    def test_ratio_invariant(self):
        g = gnp_random_graph(5, 0.6, 3)
        report = brute_force_oracle(coloring_hamiltonian(g, 2))
        assert report.valid_ratio == report.valid_count / 2**5


class TestFixtures:
    def test_ten_fixtures_ship(self):
        assert list_fixture_ids() == [f"graph_{i:02d}" for i in range(1, 11)]

    def test_all_fixtures_connected_eight_nodes(self):
        for fid in list_fixture_ids():
            g = load_fixture_graph(fid)
            assert g.n_nodes == 8
            assert g.is_connected()

    def test_unknown_fixture_rejected(self):
        with pytest.raises(KeyError, match="graph_99"):
            load_fixture_graph("graph_99")

    def test_metadata_sidecar_consistency(self):
        meta = fixture_metadata()
        assert set(meta) == set(list_fixture_ids())
        for fid, doc in meta.items():
            g = load_fixture_graph(fid)
            assert doc["computed"]["n_edges"] == g.n_edges
            assert doc["seed"] == int(fid.split("_")[1]) + 6

    def test_reference_matches_are_recorded_honestly(self):
        # committed edge lists reproduce the reference counts where flagged
        meta = fixture_metadata()
        for fid, doc in meta.items():
            report = brute_force_oracle(coloring_hamiltonian(load_fixture_graph(fid), 4))
            assert (report.valid_count == doc["reference"]["s"]) == doc[
                "matches_reference"
            ]

    def test_text_round_trip(self):
        g = load_fixture_graph("graph_01")
        assert graph_from_text(graph_to_text(g)) == g


class TestGenerateConnectedGraphs:
    def test_yields_requested_count_with_predicates(self):
        pairs = list(generate_connected_graphs(5, 0.5, 4, seed_base=0, require_bipartite=True))
        assert len(pairs) == 4
        for _, g in pairs:
            assert g.is_connected() and g.is_bipartite()

    def test_deterministic_selection(self):
        a = [s for s, _ in generate_connected_graphs(5, 0.5, 3, seed_base=0)]
        b = [s for s, _ in generate_connected_graphs(5, 0.5, 3, seed_base=0)]
        assert a == b
