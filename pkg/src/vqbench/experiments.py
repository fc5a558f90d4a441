"""Experiment harness: run method/instance/ansatz/seed matrices and persist
results.

Each cell of the matrix is one training run; its record is written to
``<output_dir>/records/<cell>.json`` atomically, so partly finished
experiments leave only whole records behind. A flat ``summary.csv`` (one row
per record) plus per-metric tidy CSVs for boxplot-style figures are emitted
from the persisted records, and can be regenerated offline with
:func:`summarize_records`.

The worker count is taken from the ``VQBENCH_WORKERS`` environment variable
(default 1); cells are independent and self-seeded, so results do not depend
on the worker count.
"""

from __future__ import annotations

import csv
import json
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .instances import (
    Graph,
    ProblemInstance,
    coloring_hamiltonian,
    gnp_random_graph,
    load_fixture_graph,
    maxcut_hamiltonian,
)
from .metrics import energy_gap, final_overall_accuracy, most_likely_accuracy
from .training import OptimizerConfig, RunRecord, run_method

WORKERS_ENV_VAR = "VQBENCH_WORKERS"

SUMMARY_COLUMNS = (
    "method",
    "instance",
    "ansatz",
    "seed",
    "final_accuracy",
    "most_likely_accuracy",
    "total_iterations",
    "energy_gap",
    "final_expectation",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment matrix."""

    instances: tuple[dict, ...]
    problem: str
    methods: tuple[str, ...]
    ansatzes: tuple[str, ...] = ("ry_cnot_ladder",)
    colors: int = 4
    layers: int = 3
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    shots: int = 200
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    output_dir: str = "results"

    def __post_init__(self):
        if not self.instances or not self.methods or not self.seeds:
            raise ValueError("need at least one instance, method, and seed")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.problem not in ("coloring", "maxcut"):
            raise ValueError(f"unknown problem {self.problem!r}")
        object.__setattr__(self, "instances", tuple(dict(s) for s in self.instances))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "ansatzes", tuple(self.ansatzes))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ExperimentConfig":
        opt = doc.get("optimizer", {})
        return cls(
            instances=tuple(doc["instances"]),
            problem=doc["problem"],
            methods=tuple(doc["methods"]),
            ansatzes=tuple(doc.get("ansatzes", ("ry_cnot_ladder",))),
            colors=int(doc.get("colors", 4)),
            layers=int(doc.get("layers", 3)),
            seeds=tuple(doc.get("seeds", (0, 1, 2, 3, 4))),
            shots=int(doc.get("shots", 200)),
            optimizer=OptimizerConfig(**opt),
            output_dir=doc.get("output_dir", "results"),
        )

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def _instance_from_spec(spec: dict, problem: str, colors: int) -> ProblemInstance:
    if "fixture" in spec:
        name = spec["fixture"]
        graph = load_fixture_graph(name)
    elif "gnp" in spec:
        g = spec["gnp"]
        graph = gnp_random_graph(int(g["n"]), float(g["p"]), int(g["seed"]))
        name = spec.get("name", f"gnp{g['n']}_p{g['p']}_s{g['seed']}")
    elif "edges" in spec:
        graph = Graph(int(spec["n_nodes"]), tuple(tuple(e) for e in spec["edges"]))
        name = spec.get("name", f"graph_n{graph.n_nodes}_e{graph.n_edges}")
    else:
        raise ValueError(f"instance spec needs fixture/gnp/edges, got {spec}")
    if problem == "coloring":
        return coloring_hamiltonian(graph, colors, name=name)
    return maxcut_hamiltonian(graph, name=name)


def resolve_instances(cfg: ExperimentConfig) -> list[ProblemInstance]:
    return [_instance_from_spec(s, cfg.problem, cfg.colors) for s in cfg.instances]


def _uses_ansatz(method: str) -> bool:
    return not method.startswith("qaoa") and not method.startswith("sha+qaoa")


def experiment_cells(cfg: ExperimentConfig) -> list[tuple[dict, str, str, int]]:
    """(instance spec, method, ansatz, seed) for every run in the matrix.

    QAOA-family methods build their circuit from the cost function, so the
    ansatz axis collapses to a single ``qaoa`` entry for them.
    """
    cells = []
    for spec in cfg.instances:
        for method in cfg.methods:
            ansatzes = cfg.ansatzes if _uses_ansatz(method) else ("qaoa",)
            for ansatz in ansatzes:
                for seed in cfg.seeds:
                    cells.append((spec, method, ansatz, seed))
    return cells


def _cell_id(cfg: ExperimentConfig, spec: dict, method: str, ansatz: str, seed: int) -> str:
    instance = _instance_from_spec(spec, cfg.problem, cfg.colors)
    safe_method = method.replace(":", "-").replace("+", "_")
    return f"{instance.name}__{safe_method}__{ansatz}__s{seed}"


def _run_cell(args: tuple) -> tuple[str, dict | None, str | None]:
    """Execute one cell; returns (cell_id, record dict, error message)."""
    cfg_doc, spec, method, ansatz, seed = args
    cfg = ExperimentConfig.from_json_dict(cfg_doc)
    cell = _cell_id(cfg, spec, method, ansatz, seed)
    try:
        instance = _instance_from_spec(spec, cfg.problem, cfg.colors)
        record = run_method(
            method,
            instance,
            template_id=ansatz if _uses_ansatz(method) else "ry_cnot_ladder",
            layers=cfg.layers,
            seed=seed,
            cfg=cfg.optimizer,
            shots=cfg.shots,
        )
        return cell, record.to_json_dict(), None
    except Exception as exc:  # noqa: BLE001 - a failed cell must not kill the matrix
        return cell, None, f"{type(exc).__name__}: {exc}"


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _config_doc(cfg: ExperimentConfig) -> dict:
    return {
        "instances": list(cfg.instances),
        "problem": cfg.problem,
        "methods": list(cfg.methods),
        "ansatzes": list(cfg.ansatzes),
        "colors": cfg.colors,
        "layers": cfg.layers,
        "seeds": list(cfg.seeds),
        "shots": cfg.shots,
        "optimizer": {
            "max_iterations": cfg.optimizer.max_iterations,
            "initial_trust_radius": cfg.optimizer.initial_trust_radius,
            "final_tolerance": cfg.optimizer.final_tolerance,
            "progress_threshold": cfg.optimizer.progress_threshold,
            "progress_window": cfg.optimizer.progress_window,
        },
        "output_dir": cfg.output_dir,
    }


def run_experiment(cfg: ExperimentConfig) -> tuple[list[RunRecord], dict[str, str]]:
    """Run every cell; persist records and summaries under ``cfg.output_dir``.

    Returns the successful records and a map of failed cell id -> error.
    """
    out = Path(cfg.output_dir)
    records_dir = out / "records"
    records_dir.mkdir(parents=True, exist_ok=True)
    _write_atomic(out / "config.json", json.dumps(_config_doc(cfg), indent=2))

    cfg_doc = _config_doc(cfg)
    jobs = [(cfg_doc, *cell) for cell in experiment_cells(cfg)]
    workers = int(os.environ.get(WORKERS_ENV_VAR, "1"))
    results: list[tuple[str, dict | None, str | None]] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, jobs))
    else:
        results = [_run_cell(job) for job in jobs]

    records: list[RunRecord] = []
    failures: dict[str, str] = {}
    for cell, record_doc, error in results:
        if error is not None:
            failures[cell] = error
            continue
        _write_atomic(
            records_dir / f"{cell}.json", json.dumps(record_doc, sort_keys=True)
        )
        records.append(RunRecord.from_json_dict(record_doc))
    if failures:
        _write_atomic(out / "failures.json", json.dumps(failures, indent=2))
    summarize_records(records, cfg, out)
    return records, failures


def load_records(records_dir: str | Path) -> list[RunRecord]:
    paths = sorted(Path(records_dir).glob("*.json"))
    return [RunRecord.loads(p.read_text()) for p in paths]


def _oracle_for(record: RunRecord, instances: dict[str, ProblemInstance]):
    return instances[record.instance].oracle


def summary_rows(
    records: list[RunRecord], cfg: ExperimentConfig
) -> list[dict[str, object]]:
    """One flat row per record: the columns behind every figure."""
    instances = {i.name: i for i in resolve_instances(cfg)}
    rows = []
    for r in records:
        oracle = _oracle_for(r, instances)
        gap = (
            energy_gap(r, oracle, 0.02) if cfg.problem == "maxcut" else ""
        )
        rows.append(
            {
                "method": r.method,
                "instance": r.instance,
                "ansatz": r.ansatz,
                "seed": r.seed,
                "final_accuracy": final_overall_accuracy(r, 0.02),
                "most_likely_accuracy": most_likely_accuracy(r, 0.02),
                "total_iterations": r.total_iterations,
                "energy_gap": gap,
                "final_expectation": r.final_expectation,
            }
        )
    return rows


def _write_csv(path: Path, columns: tuple[str, ...], rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns))
        writer.writeheader()
        writer.writerows(rows)


def _aggregate(rows: list[dict], metric: str) -> list[dict]:
    by_method: dict[str, list[float]] = {}
    for row in rows:
        value = row[metric]
        if value == "":
            continue
        by_method.setdefault(row["method"], []).append(float(value))
    return [
        {
            "method": method,
            "metric": metric,
            "mean": statistics.mean(vals),
            "median": statistics.median(vals),
            "n": len(vals),
        }
        for method, vals in sorted(by_method.items())
    ]


def summarize_records(
    records: list[RunRecord], cfg: ExperimentConfig, out_dir: str | Path
) -> list[dict]:
    """Write summary.csv, aggregates.csv, and tidy per-figure CSVs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = summary_rows(records, cfg)
    _write_csv(out / "summary.csv", SUMMARY_COLUMNS, rows)

    aggregates: list[dict] = []
    for metric in ("final_accuracy", "most_likely_accuracy", "total_iterations", "energy_gap"):
        aggregates.extend(_aggregate(rows, metric))
    _write_csv(out / "aggregates.csv", ("method", "metric", "mean", "median", "n"), aggregates)

    tidy_cols = ("method", "instance", "ansatz", "seed", "value")

    def tidy(metric_fn) -> list[dict]:
        instances = {i.name: i for i in resolve_instances(cfg)}
        out_rows = []
        for r in records:
            value = metric_fn(r, instances)
            if value is None:
                continue
            out_rows.append(
                {
                    "method": r.method,
                    "instance": r.instance,
                    "ansatz": r.ansatz,
                    "seed": r.seed,
                    "value": value,
                }
            )
        return out_rows

    figures = {
        # accuracy distributions (assembly strategies, solution quality, hybrids)
        "fig_accuracy.csv": lambda r, _: final_overall_accuracy(r, 0.02),
        # modal-shot stability over the trailing 2% / 3% of steps
        "fig_most_likely_2pct.csv": lambda r, _: most_likely_accuracy(r, 0.02),
        "fig_most_likely_3pct.csv": lambda r, _: most_likely_accuracy(r, 0.03),
        # optimization effort
        "fig_iterations.csv": lambda r, _: r.total_iterations,
        # Max-Cut distance to the optimum, in cut units
        "fig_energy_gap.csv": lambda r, insts: (
            energy_gap(r, insts[r.instance].oracle, 0.02)
            if cfg.problem == "maxcut"
            else None
        ),
    }
    for name, fn in figures.items():
        _write_csv(out / name, tidy_cols, tidy(fn))
    return rows
