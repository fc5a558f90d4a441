"""Training procedures: plain VQE, curriculum Hamiltonian assembly (SHA),
layerwise learning, Layer-VQE, QAOA, and their SHA hybrids.

All methods minimize a 200-shot sampled expectation with a derivative-free
linear-approximation trust-region optimizer (COBYLA) under one global
iteration budget (default 4000 evaluations per run). A stage stops when its
budget is exhausted or when the trust region shrinks below the stage's
tolerance: partial assembly/growth stages run at the coarse floor 0.8 so they
stay short and cannot overfit their partial objective, while the last stage
of every method runs at 1e-6. An optional windowed minimal-progress stop is
available through :class:`OptimizerConfig` for deterministic objectives.

Method selection grammar: ``vqe``, ``sha:<strategy>``, ``ll``, ``lvqe``,
``qaoa:<p>``, ``sha+ll:<strategy>``, ``sha+lvqe:<strategy>``,
``sha+qaoa:<strategy>:<p>`` with strategies as in
:mod:`vqbench.partitioning`.

Every run is reproducible: the shot stream is a single per-run generator
seeded from the run seed and consumed once per objective evaluation, and the
optimizer is deterministic, so ``(method, instance, ansatz, seed)`` fixes the
resulting record byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize as sp_optimize

from .ansatz import (
    AnsatzTemplate,
    build_ansatz,
    get_template,
    prepend_ry_layer,
    qaoa_circuit,
    qaoa_circuit_mixed,
    qaoa_initial_params,
)
from .hamiltonian import (
    DiagonalHamiltonian,
    expectation_exact,
    expectation_from_index_counts,
    index_to_bits,
    partial_hamiltonian,
)
from .instances import ProblemInstance
from .metrics import MetricSnapshot, build_snapshot
from .partitioning import PartitionSchedule, parse_strategy
from .simulator import ParamCircuit, run_circuit, sample_indices

DEFAULT_SHOTS = 200
PARTIAL_TOLERANCE = 0.8
FINAL_TOLERANCE = 1e-6


@dataclass(frozen=True)
class OptimizerConfig:
    """Budget and stop conditions for one optimization stage or run.

    ``final_tolerance`` is the trust-region radius below which a stage stops;
    partial assembly/growth stages run at the coarse radius 0.8 and the last
    stage of every method at this value. ``progress_threshold`` additionally
    stops a stage when the best loss improves by less than the threshold over
    ``progress_window`` evaluations; 0 disables it (the default - under shot
    noise a best-loss record can stay unbroken for long healthy stretches).
    """

    max_iterations: int = 4000
    initial_trust_radius: float = 1.0
    final_tolerance: float = FINAL_TOLERANCE
    progress_threshold: float = 0.0
    progress_window: int = 10

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.final_tolerance <= 0 or self.initial_trust_radius <= 0:
            raise ValueError("tolerances must be positive")
        if self.progress_threshold < 0:
            raise ValueError("progress_threshold must be >= 0")
        if self.progress_window < 1:
            raise ValueError("progress_window must be >= 1")


@dataclass
class StageResult:
    """Outcome of one :func:`minimize` call."""

    params_out: np.ndarray
    iterations_used: int
    loss_trace: list[tuple[int, float]]
    shot_trace: list[dict[str, int]] = field(default_factory=list)


def minimize(f, x0, cfg: OptimizerConfig) -> StageResult:
    """Derivative-free trust-region descent (COBYLA) with trace recording.

    Stops on the evaluation budget, on the trust region shrinking below
    ``final_tolerance``, or on the windowed progress rule. Once a stop
    condition fires, later optimizer probes are answered with the best loss
    seen and left out of the trace, so ``iterations_used`` counts true
    objective evaluations only. ``params_out`` is the best point evaluated.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.size == 0:
        return StageResult(x0.copy(), 0, [])
    losses: list[float] = []
    best_hist: list[float] = []
    best_loss = math.inf
    best_x = x0.copy()
    window = cfg.progress_window
    done = False

    def wrapped(x):
        nonlocal best_loss, best_x, done
        if done or len(losses) >= cfg.max_iterations:
            done = True
            return best_loss
        value = float(f(np.asarray(x, dtype=np.float64)))
        losses.append(value)
        if value < best_loss:
            best_loss = value
            best_x = np.array(x, dtype=np.float64, copy=True)
        best_hist.append(best_loss)
        if (
            cfg.progress_threshold > 0
            and len(best_hist) > window
            and best_hist[-window - 1] - best_hist[-1] < cfg.progress_threshold
        ):
            done = True
        return value

    sp_optimize.minimize(
        wrapped,
        x0,
        method="COBYLA",
        options={
            "maxiter": cfg.max_iterations,
            "rhobeg": cfg.initial_trust_radius,
            "tol": cfg.final_tolerance,
        },
    )
    return StageResult(best_x, len(losses), list(enumerate(losses)))


@dataclass(frozen=True)
class RunRecord:
    """Complete, reproducible trace of one training run."""

    method: str
    instance: str
    ansatz: str
    seed: int
    loss_trace: tuple[float, ...]
    snapshots: tuple[MetricSnapshot, ...]
    final_params: tuple[float, ...]
    total_iterations: int
    stages: tuple[dict, ...]
    final_expectation: float

    def __post_init__(self):
        if self.total_iterations != len(self.loss_trace):
            raise ValueError("total_iterations must equal the loss trace length")
        if self.total_iterations != sum(s["iterations"] for s in self.stages):
            raise ValueError("stage iteration counts must sum to total_iterations")

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "instance": self.instance,
            "ansatz": self.ansatz,
            "seed": self.seed,
            "loss_trace": list(self.loss_trace),
            "snapshots": [s.to_json_dict() for s in self.snapshots],
            "final_params": list(self.final_params),
            "total_iterations": self.total_iterations,
            "stages": [dict(s) for s in self.stages],
            "final_expectation": self.final_expectation,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RunRecord":
        return cls(
            method=doc["method"],
            instance=doc["instance"],
            ansatz=doc["ansatz"],
            seed=int(doc["seed"]),
            loss_trace=tuple(float(v) for v in doc["loss_trace"]),
            snapshots=tuple(
                MetricSnapshot.from_json_dict(s) for s in doc["snapshots"]
            ),
            final_params=tuple(float(v) for v in doc["final_params"]),
            total_iterations=int(doc["total_iterations"]),
            stages=tuple(
                {"label": s["label"], "iterations": int(s["iterations"])}
                for s in doc["stages"]
            ),
            final_expectation=float(doc["final_expectation"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "RunRecord":
        return cls.from_json_dict(json.loads(text))


def _target_mask(instance: ProblemInstance) -> np.ndarray:
    """Boolean mask of valid (coloring) or optimal (Max-Cut) basis states."""
    diag = instance.hamiltonian.diagonal
    if instance.kind == "coloring":
        return diag == 0.0
    return diag == diag.max()


class _RunContext:
    """Per-run state shared by all stages: shot stream, traces, snapshots."""

    def __init__(self, instance: ProblemInstance, seed: int, shots: int):
        self.instance = instance
        self.shots = shots
        self.rng = np.random.default_rng(seed)
        self.target_mask = _target_mask(instance)
        self.cut_diagonal = (
            instance.hamiltonian.diagonal if instance.kind == "maxcut" else None
        )
        self.loss_trace: list[float] = []
        self.snapshots: list[MetricSnapshot] = []
        self.stages: list[dict] = []

    def record(self, loss: float, values: np.ndarray, counts: np.ndarray) -> None:
        iteration = len(self.loss_trace)
        self.loss_trace.append(loss)
        self.snapshots.append(
            build_snapshot(
                iteration,
                loss,
                values,
                counts,
                self.target_mask,
                self.cut_diagonal,
                self.instance.n_qubits,
            )
        )

    def run_stage(
        self,
        label: str,
        circuit: ParamCircuit,
        objective_h: DiagonalHamiltonian,
        init_full: np.ndarray,
        budget: int,
        tolerance: float,
        cfg: OptimizerConfig,
        free_slots: np.ndarray | None = None,
    ) -> np.ndarray:
        """Optimize (a masked view of) the parameters; returns the full vector."""
        base = np.asarray(init_full, dtype=np.float64).copy()
        free = (
            np.arange(base.size) if free_slots is None else np.asarray(free_slots, int)
        )
        shot_dicts: list[dict[str, int]] = []
        n_qubits = circuit.n_qubits

        def f(sub):
            full = base.copy()
            full[free] = sub
            state = run_circuit(circuit, full)
            values, counts = sample_indices(state, self.shots, self.rng)
            loss = expectation_from_index_counts(objective_h, values, counts)
            self.record(loss, values, counts)
            shot_dicts.append(
                {
                    index_to_bits(int(z), n_qubits): int(c)
                    for z, c in zip(values, counts)
                }
            )
            return loss

        stage_cfg = replace(cfg, max_iterations=budget, final_tolerance=tolerance)
        result = minimize(f, base[free], stage_cfg)
        result.shot_trace = shot_dicts
        self.stages.append({"label": label, "iterations": result.iterations_used})
        out = base.copy()
        out[free] = result.params_out
        return out

    def finish(
        self,
        method: str,
        ansatz_id: str,
        seed: int,
        circuit: ParamCircuit,
        final_params: np.ndarray,
    ) -> RunRecord:
        state = run_circuit(circuit, final_params)
        final_expectation = expectation_exact(self.instance.hamiltonian, state)
        return RunRecord(
            method=method,
            instance=self.instance.name or "unnamed",
            ansatz=ansatz_id,
            seed=seed,
            loss_trace=tuple(self.loss_trace),
            snapshots=tuple(self.snapshots),
            final_params=tuple(float(v) for v in final_params),
            total_iterations=len(self.loss_trace),
            stages=tuple(self.stages),
            final_expectation=final_expectation,
        )


def _split_budget(total: int, n_stages: int) -> list[int]:
    """Even split with the remainder granted to the final stage."""
    if n_stages < 1:
        raise ValueError("need at least one stage")
    base = total // n_stages
    if base < 1:
        raise ValueError(
            f"budget {total} is too small for {n_stages} stages"
        )
    sizes = [base] * n_stages
    sizes[-1] += total - base * n_stages
    return sizes


def _stage_tolerance(index: int, last_index: int, cfg: OptimizerConfig) -> float:
    """Coarse trust-region floor for partial stages, fine for the last one."""
    return cfg.final_tolerance if index == last_index else PARTIAL_TOLERANCE


def _check_compatible(instance: ProblemInstance, circuit: ParamCircuit) -> None:
    if circuit.n_qubits != instance.n_qubits:
        raise ValueError(
            f"circuit acts on {circuit.n_qubits} qubits but the instance "
            f"needs {instance.n_qubits}"
        )


def train_vqe(
    instance: ProblemInstance,
    ansatz: ParamCircuit,
    seed: int,
    cfg: OptimizerConfig | None = None,
    shots: int = DEFAULT_SHOTS,
    ansatz_id: str = "",
    method_id: str = "vqe",
) -> RunRecord:
    """Standard VQE: zero-initialized parameters against the full Hamiltonian."""
    cfg = cfg or OptimizerConfig()
    _check_compatible(instance, ansatz)
    ctx = _RunContext(instance, seed, shots)
    h = instance.training_hamiltonian()
    params = ctx.run_stage(
        "full",
        ansatz,
        h,
        np.zeros(ansatz.n_params),
        cfg.max_iterations,
        cfg.final_tolerance,
        cfg,
    )
    return ctx.finish(method_id, ansatz_id, seed, ansatz, params)


def train_sha(
    instance: ProblemInstance,
    ansatz: ParamCircuit,
    schedule: PartitionSchedule,
    seed: int,
    cfg: OptimizerConfig | None = None,
    shots: int = DEFAULT_SHOTS,
    ansatz_id: str = "",
    method_id: str = "sha",
) -> RunRecord:
    """Curriculum training against the growing cumulative partial Hamiltonians.

    Stage k minimizes the terms of cumulative set S_k, starting from the
    previous stage's parameters (stage 1 from zero); the budget is split
    evenly over stages with the remainder granted to the last (full) stage.
    """
    cfg = cfg or OptimizerConfig()
    _check_compatible(instance, ansatz)
    if schedule.n_terms != instance.hamiltonian.n_terms:
        raise ValueError(
            f"schedule covers {schedule.n_terms} terms but the instance "
            f"has {instance.hamiltonian.n_terms}"
        )
    ctx = _RunContext(instance, seed, shots)
    h = instance.training_hamiltonian()
    budgets = _split_budget(cfg.max_iterations, schedule.n_stages)
    params = np.zeros(ansatz.n_params)
    last = schedule.n_stages - 1
    for k, stage_set in enumerate(schedule.cumulative):
        params = ctx.run_stage(
            f"assembly_{k + 1}/{schedule.n_stages}",
            ansatz,
            partial_hamiltonian(h, stage_set),
            params,
            budgets[k],
            _stage_tolerance(k, last, cfg),
            cfg,
        )
    return ctx.finish(method_id, ansatz_id, seed, ansatz, params)


def _grown_params(previous: np.ndarray, n_params: int) -> np.ndarray:
    """Previous parameters padded with zeros for newly added trailing slots."""
    out = np.zeros(n_params)
    out[: previous.size] = previous
    return out


def train_layerwise(
    instance: ProblemInstance,
    template: AnsatzTemplate,
    layers: int,
    seed: int,
    cfg: OptimizerConfig | None = None,
    shots: int = DEFAULT_SHOTS,
    method_id: str = "ll",
) -> RunRecord:
    """Two-phase layerwise learning (grow one layer at a time, train only the
    newest layer; then one full-circuit pass).

    Requires an identity-at-zero template so a freshly added zero-initialized
    layer leaves the prepared state unchanged.
    """
    cfg = cfg or OptimizerConfig()
    if layers < 1:
        raise ValueError("layers must be >= 1")
    if not template.identity_at_zero:
        raise ValueError(
            f"template {template.id!r} is not an identity at zero angles; "
            "layerwise growth would perturb the state"
        )
    ctx = _RunContext(instance, seed, shots)
    h = instance.training_hamiltonian()
    n_stages = layers + 1
    budgets = _split_budget(cfg.max_iterations, n_stages)
    params = np.zeros(0)
    circuit = None
    for layer in range(layers):
        circuit = build_ansatz(template, instance.n_qubits, layer + 1)
        _check_compatible(instance, circuit)
        params = _grown_params(params, circuit.n_params)
        params = ctx.run_stage(
            f"grow_layer_{layer + 1}/{layers}",
            circuit,
            h,
            params,
            budgets[layer],
            PARTIAL_TOLERANCE,
            cfg,
            free_slots=np.asarray(circuit.layer_param_indices(layer)),
        )
    params = ctx.run_stage(
        "full_circuit",
        circuit,
        h,
        params,
        budgets[-1],
        cfg.final_tolerance,
        cfg,
    )
    return ctx.finish(method_id, template.id, seed, circuit, params)


def train_layer_vqe(
    instance: ProblemInstance,
    template: AnsatzTemplate,
    layers: int,
    seed: int,
    cfg: OptimizerConfig | None = None,
    shots: int = DEFAULT_SHOTS,
    method_id: str = "lvqe",
) -> RunRecord:
    """Layer-VQE: an initial trainable RY layer, then one identity-at-zero
    layer added per stage with *all* parameters retrained each time."""
    cfg = cfg or OptimizerConfig()
    if layers < 1:
        raise ValueError("layers must be >= 1")
    if not template.identity_at_zero:
        raise ValueError(
            f"template {template.id!r} is not an identity at zero angles"
        )
    ctx = _RunContext(instance, seed, shots)
    h = instance.training_hamiltonian()
    budgets = _split_budget(cfg.max_iterations, layers)
    params = np.zeros(instance.n_qubits)  # the initial RY prologue
    circuit = None
    for layer in range(layers):
        circuit = prepend_ry_layer(build_ansatz(template, instance.n_qubits, layer + 1))
        _check_compatible(instance, circuit)
        params = _grown_params(params, circuit.n_params)
        params = ctx.run_stage(
            f"grow_layer_{layer + 1}/{layers}",
            circuit,
            h,
            params,
            budgets[layer],
            _stage_tolerance(layer, layers - 1, cfg),
            cfg,
        )
    return ctx.finish(method_id, template.id, seed, circuit, params)


def train_qaoa(
    instance: ProblemInstance,
    p: int,
    seed: int,
    cfg: OptimizerConfig | None = None,
    shots: int = DEFAULT_SHOTS,
    method_id: str = "",
) -> RunRecord:
    """QAOA with annealing-style initial angles, all 2p parameters trained."""
    cfg = cfg or OptimizerConfig()
    ctx = _RunContext(instance, seed, shots)
    h = instance.training_hamiltonian()
    circuit = qaoa_circuit(h, p)
    params = ctx.run_stage(
        "full",
        circuit,
        h,
        qaoa_initial_params(p),
        cfg.max_iterations,
        cfg.final_tolerance,
        cfg,
    )
    return ctx.finish(method_id or f"qaoa:{p}", "qaoa", seed, circuit, params)


def train_sha_hybrid(
    base: str,
    instance: ProblemInstance,
    schedule: PartitionSchedule,
    template: AnsatzTemplate | None = None,
    layers: int = 3,
    p: int = 3,
    seed: int = 0,
    cfg: OptimizerConfig | None = None,
    shots: int = DEFAULT_SHOTS,
    method_id: str = "",
) -> RunRecord:
    """Combine curriculum Hamiltonian assembly with a layer-growing base.

    ``ll``/``lvqe`` bases run the full assembly stage sequence inside every
    layer-growth step. The ``qaoa`` base grows one circuit block at a time;
    block l's cost phases and its training objective use cumulative stage
    ``ceil(l * M / p)``, so circuit depth and cost assembly advance together.
    """
    cfg = cfg or OptimizerConfig()
    if schedule.n_terms != instance.hamiltonian.n_terms:
        raise ValueError(
            f"schedule covers {schedule.n_terms} terms but the instance "
            f"has {instance.hamiltonian.n_terms}"
        )
    if base not in ("ll", "lvqe", "qaoa"):
        raise ValueError(f"unknown hybrid base {base!r}; use ll, lvqe, or qaoa")
    if layers < 1 or p < 1:
        raise ValueError("layers and p must be >= 1")
    ctx = _RunContext(instance, seed, shots)
    h = instance.training_hamiltonian()
    m_stages = schedule.n_stages

    if base == "qaoa":
        stage_of_block = [
            math.ceil((block + 1) * m_stages / p) - 1 for block in range(p)
        ]
        partials = [
            partial_hamiltonian(h, schedule.cumulative[k]) for k in stage_of_block
        ]
        budgets = _split_budget(cfg.max_iterations, p)
        init = qaoa_initial_params(p)
        params = np.zeros(0)
        circuit = None
        for block in range(p):
            circuit = qaoa_circuit_mixed(partials[: block + 1])
            _check_compatible(instance, circuit)
            grown = _grown_params(params, circuit.n_params)
            grown[2 * block : 2 * block + 2] = init[2 * block : 2 * block + 2]
            params = ctx.run_stage(
                f"block_{block + 1}/{p}_assembly_{stage_of_block[block] + 1}/{m_stages}",
                circuit,
                partials[block],
                grown,
                budgets[block],
                _stage_tolerance(block, p - 1, cfg),
                cfg,
            )
        record_ansatz = "qaoa"
        final_circuit = circuit
    else:
        if template is None:
            raise ValueError("ll/lvqe hybrids need an ansatz template")
        if not template.identity_at_zero:
            raise ValueError(
                f"template {template.id!r} is not an identity at zero angles"
            )
        extra_full_pass = base == "ll"
        n_atomic = layers * m_stages + (1 if extra_full_pass else 0)
        budgets = _split_budget(cfg.max_iterations, n_atomic)
        last_atomic = n_atomic - 1
        params = np.zeros(instance.n_qubits if base == "lvqe" else 0)
        circuit = None
        atomic = 0
        for layer in range(layers):
            circuit = build_ansatz(template, instance.n_qubits, layer + 1)
            if base == "lvqe":
                circuit = prepend_ry_layer(circuit)
            _check_compatible(instance, circuit)
            params = _grown_params(params, circuit.n_params)
            if base == "ll":
                free = np.asarray(circuit.layer_param_indices(layer))
            else:
                free = None  # lvqe retrains every parameter added so far
            for k, stage_set in enumerate(schedule.cumulative):
                params = ctx.run_stage(
                    f"grow_layer_{layer + 1}/{layers}_assembly_{k + 1}/{m_stages}",
                    circuit,
                    partial_hamiltonian(h, stage_set),
                    params,
                    budgets[atomic],
                    _stage_tolerance(atomic, last_atomic, cfg),
                    cfg,
                    free_slots=free,
                )
                atomic += 1
        if extra_full_pass:
            params = ctx.run_stage(
                "full_circuit",
                circuit,
                h,
                params,
                budgets[-1],
                _stage_tolerance(last_atomic, last_atomic, cfg),
                cfg,
            )
        record_ansatz = template.id
        final_circuit = circuit
    return ctx.finish(
        method_id or f"sha+{base}", record_ansatz, seed, final_circuit, params
    )


def run_method(
    method: str,
    instance: ProblemInstance,
    template_id: str = "ry_cnot_ladder",
    layers: int = 3,
    seed: int = 0,
    cfg: OptimizerConfig | None = None,
    shots: int = DEFAULT_SHOTS,
) -> RunRecord:
    """Dispatch a method-grammar string to the matching training procedure."""
    cfg = cfg or OptimizerConfig()
    parts = method.split(":")
    head = parts[0]
    if head == "vqe" and len(parts) == 1:
        ansatz = build_ansatz(get_template(template_id), instance.n_qubits, layers)
        return train_vqe(instance, ansatz, seed, cfg, shots, template_id, method)
    if head == "sha" and len(parts) == 3:
        schedule = parse_strategy(":".join(parts[1:]), instance, seed)
        ansatz = build_ansatz(get_template(template_id), instance.n_qubits, layers)
        return train_sha(
            instance, ansatz, schedule, seed, cfg, shots, template_id, method
        )
    if head == "ll" and len(parts) == 1:
        return train_layerwise(
            instance, get_template(template_id), layers, seed, cfg, shots, method
        )
    if head == "lvqe" and len(parts) == 1:
        return train_layer_vqe(
            instance, get_template(template_id), layers, seed, cfg, shots, method
        )
    if head == "qaoa" and len(parts) == 2:
        return train_qaoa(instance, int(parts[1]), seed, cfg, shots, method)
    if head in ("sha+ll", "sha+lvqe") and len(parts) == 3:
        schedule = parse_strategy(":".join(parts[1:]), instance, seed)
        return train_sha_hybrid(
            head.removeprefix("sha+"),
            instance,
            schedule,
            template=get_template(template_id),
            layers=layers,
            seed=seed,
            cfg=cfg,
            shots=shots,
            method_id=method,
        )
    if head == "sha+qaoa" and len(parts) == 4:
        schedule = parse_strategy(":".join(parts[1:3]), instance, seed)
        return train_sha_hybrid(
            "qaoa",
            instance,
            schedule,
            p=int(parts[3]),
            seed=seed,
            cfg=cfg,
            shots=shots,
            method_id=method,
        )
    raise ValueError(f"unrecognized method string {method!r}")
