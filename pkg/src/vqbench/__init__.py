"""Variational quantum optimization workbench.

Builds diagonal cost Hamiltonians for graph coloring and Max-Cut, simulates
parameterized circuits on a dense statevector backend, and trains them with
plain VQE, curriculum Hamiltonian assembly (SHA), layerwise learning,
Layer-VQE, QAOA, and SHA hybrids, under a shot-based, derivative-free
optimization protocol with brute-force oracles and an experiment harness.
"""

from .ansatz import (
    TEMPLATES,
    AnsatzTemplate,
    build_ansatz,
    get_template,
    prepend_ry_layer,
    qaoa_circuit,
    qaoa_circuit_mixed,
    qaoa_initial_params,
)
from .experiments import (
    ExperimentConfig,
    experiment_cells,
    load_records,
    resolve_instances,
    run_experiment,
    summarize_records,
    summary_rows,
)
from .hamiltonian import (
    DiagonalHamiltonian,
    PauliTerm,
    bits_to_index,
    energy_of_basis_state,
    expectation_exact,
    expectation_from_counts,
    index_to_bits,
    partial_hamiltonian,
)
from .instances import (
    Graph,
    OracleReport,
    ProblemInstance,
    brute_force_oracle,
    coloring_hamiltonian,
    decode_coloring,
    encode_coloring,
    fixture_metadata,
    generate_connected_graphs,
    gnp_random_graph,
    list_fixture_ids,
    load_fixture_graph,
    maxcut_hamiltonian,
)
from .metrics import (
    MetricSnapshot,
    energy_gap,
    final_overall_accuracy,
    most_likely_accuracy,
    overall_accuracy,
)
from .partitioning import (
    PartitionSchedule,
    kmeans_partition,
    nodewise_partition,
    parse_strategy,
    random_partition,
    sequential_partition,
)
from .simulator import (
    Gate,
    ParamCircuit,
    param_shift_gradient,
    run_circuit,
    sample,
    zero_state,
)
from .training import (
    OptimizerConfig,
    RunRecord,
    StageResult,
    minimize,
    run_method,
    train_layer_vqe,
    train_layerwise,
    train_qaoa,
    train_sha,
    train_sha_hybrid,
    train_vqe,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
