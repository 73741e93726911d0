"""Experiment harness: seeded Monte Carlo recovery runs and the
classification trend table.

Determinism contract: every emitted artifact is a pure function of the
experiment specification (config, algorithms, trials, base seed, options).
Trial i draws its graph from seed base_seed + i, trials are computed
independently, and rows are sorted by (config id, algorithm, trial) before
emission, so worker count cannot change any output byte.  Wall-clock
timings are recorded on each row but excluded from files unless explicitly
requested, keeping file bytes run-invariant.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .convex import SolverOptions, recover_convex
from .counting import recover_counting
from .exhaustive import (
    MAX_EXHAUSTIVE_N,
    local_search,
    objective as partition_objective,
    solve_exhaustive,
)
from .generate import sample_adjacency, sample_observed
from .model import ConfigError, ModelConfig, partitions_equal
from .presets import EXAMPLE_IDS, example6_reference_constants, example_config
from .regimes import classify

ALGORITHMS = ("convex", "exhaustive", "counting", "local-search")
FAILURE_KINDS = ("none", "rounding", "nonconvergence", "counting", "tie")


@dataclass(frozen=True)
class ExperimentSpec:
    """One Monte Carlo experiment: a configuration, the algorithms to run
    on it, and the trial/seed/options bookkeeping."""

    config: ModelConfig
    algorithms: tuple[str, ...]
    trials: int
    base_seed: int = 0
    config_id: str = "config"
    solver_options: SolverOptions | None = None
    restarts: int = 10

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ConfigError(f"unknown algorithms {bad}; known: {list(ALGORITHMS)}")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        if "exhaustive" in self.algorithms and self.config.n > MAX_EXHAUSTIVE_N:
            raise ConfigError(
                f"exhaustive search allowed only for n <= {MAX_EXHAUSTIVE_N}, "
                f"got n = {self.config.n}"
            )


@dataclass(frozen=True)
class ResultRow:
    """One (algorithm, trial) outcome.  success means the output partition
    equals the planted one (for the exhaustive scan, additionally that the
    maximizer is unique); failure_kind explains structural failures."""

    config_id: str
    algorithm: str
    trial: int
    seed: int
    success: bool
    failure_kind: str
    objective: float
    wall_time: float


def run_trial(spec: ExperimentSpec, algorithm: str, trial: int) -> ResultRow:
    """Run one algorithm on one seeded draw.  With gamma < 1 the graph is
    partially observed, unobserved pairs are mapped to 0 and the algorithm
    receives the gamma-collapsed configuration."""
    config = spec.config
    seed = spec.base_seed + trial
    planted = config.planted_partition()
    if config.gamma < 1.0:
        observed = sample_observed(config, planted, seed)
        adjacency = observed.to_adjacency(unobserved_as=0)
        work_config = config.collapsed()
    else:
        adjacency = sample_adjacency(config, planted, seed)
        work_config = config

    start = time.perf_counter()
    failure_kind = "none"
    obj = math.nan
    if algorithm == "convex":
        rec = recover_convex(adjacency, work_config, spec.solver_options)
        success = rec.succeeded and partitions_equal(rec.partition, planted)
        if rec.failure is not None:
            failure_kind = ("nonconvergence" if rec.failure.kind == "nonconvergence"
                            else "rounding")
        obj = rec.solver.objective
    elif algorithm == "exhaustive":
        res = solve_exhaustive(adjacency, work_config)
        unique = res.tie_count == 1
        success = unique and partitions_equal(res.partition, planted)
        if not unique:
            failure_kind = "tie"
        obj = float(res.objective)
    elif algorithm == "counting":
        rec = recover_counting(adjacency, work_config)
        success = rec.succeeded and partitions_equal(rec.partition, planted)
        if rec.failure is not None:
            failure_kind = "counting"
        else:
            obj = float(partition_objective(adjacency, rec.partition))
    elif algorithm == "local-search":
        res = local_search(adjacency, work_config, seed=seed, restarts=spec.restarts)
        success = partitions_equal(res.partition, planted)
        obj = float(res.objective)
    else:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    wall = time.perf_counter() - start
    return ResultRow(
        config_id=spec.config_id,
        algorithm=algorithm,
        trial=trial,
        seed=seed,
        success=bool(success),
        failure_kind=failure_kind,
        objective=float(obj),
        wall_time=wall,
    )


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p_hat = successes / trials
    denom = 1.0 + z * z / trials
    center = (p_hat + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / trials
                         + z * z / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True, eq=False)
class MonteCarloResult:
    rows: tuple[ResultRow, ...]
    summary: dict

    def success_rate(self, algorithm: str) -> float:
        return self.summary[algorithm]["success_rate"]


def run_monte_carlo(spec: ExperimentSpec, workers: int = 1) -> MonteCarloResult:
    """Run all (algorithm, trial) pairs, optionally across worker threads.

    Output is bit-identical for any worker count: each trial depends only
    on its own seed and rows are sorted before aggregation.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    tasks = [(alg, t) for alg in spec.algorithms for t in range(spec.trials)]
    if workers == 1:
        rows = [run_trial(spec, alg, t) for alg, t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda at: run_trial(spec, *at), tasks))
    rows.sort(key=lambda row: (row.config_id, row.algorithm, row.trial))
    summary: dict = {}
    for alg in spec.algorithms:
        alg_rows = [row for row in rows if row.algorithm == alg]
        successes = sum(row.success for row in alg_rows)
        low, high = wilson_interval(successes, len(alg_rows))
        failure_counts = {kind: 0 for kind in FAILURE_KINDS}
        for row in alg_rows:
            failure_counts[row.failure_kind] += 1
        summary[alg] = {
            "trials": len(alg_rows),
            "successes": int(successes),
            "success_rate": successes / len(alg_rows),
            "ci_low": low,
            "ci_high": high,
            "failure_counts": failure_counts,
        }
    return MonteCarloResult(rows=tuple(rows), summary=summary)


# -- classification trend table -------------------------------------------

TABLE_CHECKS = (
    ("easy_clusterwise", "clusterwise"),
    ("easy_global", "global"),
    ("hard", "search"),
)

TABLE_COLUMNS = ["example", "n", "feasible", "regime"]
for _name, _short in TABLE_CHECKS:
    TABLE_COLUMNS += [f"{_short}_satisfied", f"{_short}_margin", f"{_short}_trend"]
TABLE_COLUMNS.append("note")


def run_table1(
    n_grid,
    C: float = 1.0,
    eta: float = 2.0,
    example_ids=EXAMPLE_IDS,
    constants: dict[int, dict] | None = None,
) -> list[dict]:
    """Classify each preset at each n and tabulate per-check margins.

    The trend column holds the ratio of a check's binding margin to its
    value at the previous feasible n of the same preset, making the
    asymptotic satisfied/violated pattern visible as margins drifting above
    or below 1.  Family 6 uses its reference constants unless overridden.
    Infeasible (example, n) pairs yield a feasible=False row with a note.
    """
    constants = dict(constants or {})
    rows: list[dict] = []
    for ex in example_ids:
        prev_margins: dict[str, float] = {}
        for n in n_grid:
            row: dict = {"example": ex, "n": int(n), "feasible": True,
                         "regime": "", "note": ""}
            for _, short in TABLE_CHECKS:
                row[f"{short}_satisfied"] = ""
                row[f"{short}_margin"] = math.nan
                row[f"{short}_trend"] = math.nan
            over = constants.get(ex)
            if over is None and ex == 6:
                over = example6_reference_constants(int(n))
            try:
                config = example_config(ex, int(n), over)
            except ConfigError as exc:
                row["feasible"] = False
                row["note"] = str(exc)
                rows.append(row)
                continue
            report = classify(config, C=C, eta=eta, config_id=f"example{ex}")
            row["regime"] = report.regime
            for name, short in TABLE_CHECKS:
                check = report.checks[name]
                margin = check.binding_margin
                row[f"{short}_satisfied"] = str(check.satisfied).lower()
                row[f"{short}_margin"] = margin
                if name in prev_margins and math.isfinite(prev_margins[name]) \
                        and prev_margins[name] != 0.0:
                    row[f"{short}_trend"] = margin / prev_margins[name]
                prev_margins[name] = margin
            rows.append(row)
    return rows


# -- persistence -----------------------------------------------------------

RESULT_COLUMNS = ["config_id", "algorithm", "trial", "seed", "success",
                  "failure_kind", "objective"]


def _cell(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_dicts(rows, include_timings: bool = False) -> list[dict]:
    out = []
    for row in rows:
        d = {col: getattr(row, col) for col in RESULT_COLUMNS}
        if include_timings:
            d["wall_time"] = row.wall_time
        out.append(d)
    return out


def write_dicts_csv(dicts: list[dict], path, columns: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for d in dicts:
            writer.writerow([_cell(d.get(col, "")) for col in columns])


def write_dicts_json(dicts: list[dict], path) -> None:
    with open(path, "w") as fh:
        json.dump(dicts, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_results(rows, path, fmt: str = "csv", include_timings: bool = False) -> None:
    """Persist Monte Carlo rows; timings are opt-in so that files are
    byte-identical across reruns."""
    dicts = rows_to_dicts(rows, include_timings)
    columns = RESULT_COLUMNS + (["wall_time"] if include_timings else [])
    if fmt == "csv":
        write_dicts_csv(dicts, path, columns)
    elif fmt == "json":
        write_dicts_json(dicts, path)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def write_table1(rows: list[dict], path, fmt: str = "csv") -> None:
    if fmt == "csv":
        write_dicts_csv(rows, path, TABLE_COLUMNS)
    elif fmt == "json":
        write_dicts_json(rows, path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
