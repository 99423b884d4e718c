"""Experiment runner: batches of random instances swept over rate targets in
both sharing modes, with per-row audits and CSV emission.

Each instance's channel expectations are estimated once and reused across
every rate target and scenario, so all sweep points see common instances.
The expectation estimate is also cached on disk keyed by the deployment
digest, the realization count and the pipeline version, making repeat runs
cheap.

Three files land in the output directory.  results.csv has one row per
(scenario, rate target, instance) with the solved powers, the per-operator
split of every watt, and network equipment counts; summary.csv averages the
optimal rows per (scenario, rate target); timings.csv carries wall-clock
times and search sizes.  Timing lives in its own file on purpose: the other
two are pure functions of the configuration, so reruns reproduce them byte
for byte.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .channel import (ExpectationSet, compute_statistics, estimate_expectations,
                      expectation_cache_key, load_expectations, save_expectations)
from .instance import Deployment, SystemConfig, generate_deployment
from .instance import _config_from_dict, _config_to_dict
from .program import build_sinr_program, power_coefficients, tpc_of
from .solver import Solution, SolverOptions, solve_instance, validate

DEFAULT_SE_GRID = tuple(0.25 * i for i in range(1, 13))


class HarnessError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """One batch: a base system, a rate-target grid, and the run knobs."""

    base: SystemConfig = field(default_factory=SystemConfig)
    se_grid: tuple = DEFAULT_SE_GRID
    n_instances: int = 35
    scenarios: tuple = (1, 2)
    output_dir: str = "runs"
    solver: SolverOptions = field(default_factory=SolverOptions)
    use_cache: bool = True

    def validate(self) -> None:
        if not self.se_grid:
            raise HarnessError("se_grid must be nonempty")
        if any(se < 0 for se in self.se_grid):
            raise HarnessError("rate targets must be nonnegative")
        if self.n_instances < 1:
            raise HarnessError("n_instances must be at least 1")
        if not self.scenarios or any(s not in (1, 2) for s in self.scenarios):
            raise HarnessError("scenarios must be a nonempty subset of {1, 2}")
        self.base.validate()


def config_to_json(cfg: ExperimentConfig) -> str:
    d = {
        "base": _config_to_dict(cfg.base),
        "se_grid": list(cfg.se_grid),
        "n_instances": cfg.n_instances,
        "scenarios": list(cfg.scenarios),
        "output_dir": str(cfg.output_dir),
        "solver": {
            "time_limit": cfg.solver.time_limit,
            "node_limit": cfg.solver.node_limit,
            "gap_abs": cfg.solver.gap_abs,
            "max_lp_iter": cfg.solver.max_lp_iter,
            "use_warm_start": cfg.solver.use_warm_start,
        },
        "use_cache": cfg.use_cache,
    }
    return json.dumps(d, indent=2, sort_keys=True)


def config_from_json(text: str) -> ExperimentConfig:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HarnessError(f"config file is not valid JSON: {exc}") from exc
    try:
        cfg = ExperimentConfig(
            base=_config_from_dict(d["base"]) if "base" in d else SystemConfig(),
            se_grid=tuple(d.get("se_grid", DEFAULT_SE_GRID)),
            n_instances=int(d.get("n_instances", 35)),
            scenarios=tuple(d.get("scenarios", (1, 2))),
            output_dir=d.get("output_dir", "runs"),
            solver=SolverOptions(**d.get("solver", {})),
            use_cache=bool(d.get("use_cache", True)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise HarnessError(f"bad experiment config: {exc}") from exc
    cfg.validate()
    return cfg


@dataclass
class ResultRow:
    """One solved (scenario, rate target, instance) cell."""

    scenario: int
    se_target: float
    instance: int
    status: str
    validated: Optional[bool]       # None when there is nothing to audit
    tpc_max: Optional[float]
    tpc_per_op: Optional[np.ndarray]
    breakdown_per_op: Optional[list]  # TpcBreakdown per operator
    n_active_aps: Optional[int]
    n_lcs: Optional[int]
    n_dus: Optional[int]
    node_count: int
    lp_iterations: int
    wall_time: float
    audit_failures: tuple = ()


@dataclass
class ExperimentResult:
    rows: list
    results_path: Path
    summary_path: Path
    timings_path: Path
    validation_failures: list

    @property
    def ok(self) -> bool:
        return not self.validation_failures


def _fmt(value) -> str:
    """9-significant-digit float formatting; empty string for missing."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "pass" if value else "fail"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _operator_breakdowns(sol: Solution, deployment: Deployment, pc) -> list:
    cfg = deployment.config
    out = []
    for m in range(cfg.M):
        aps = deployment.aps_of(m)
        stacks = deployment.stacks_of(m)
        n_aps = int(sol.z[aps].sum())
        n_assign = int(sol.x[sol.rho[:, m] == 1].sum())
        _, brk = tpc_of(pc, n_aps, int(sol.lc[stacks].sum()),
                        int(sol.du[stacks].sum()), n_assign)
        out.append(brk)
    return out


def _cached_expectations(deployment: Deployment, cfg: ExperimentConfig,
                         cache_dir: Path) -> ExpectationSet:
    if not cfg.use_cache:
        return estimate_expectations(compute_statistics(deployment), cfg.base)
    key = expectation_cache_key(deployment, cfg.base.n_mc)
    path = cache_dir / f"{key}.npz"
    if path.exists():
        return load_expectations(path)
    exp = estimate_expectations(compute_statistics(deployment), cfg.base)
    cache_dir.mkdir(parents=True, exist_ok=True)
    save_expectations(exp, path)
    return exp


def _instance_rows(cfg: ExperimentConfig, instance: int) -> list:
    """All rows for one deployment draw (channel work done once, reused
    across every rate target and sharing mode)."""
    cache_dir = Path(cfg.output_dir) / "cache"
    pc = power_coefficients(cfg.base)
    deployment = generate_deployment(cfg.base, instance)
    exp = _cached_expectations(deployment, cfg, cache_dir)
    rows = []
    for se in cfg.se_grid:
        sp = build_sinr_program(exp, cfg.base, se)
        for scenario in sorted(cfg.scenarios):
            t0 = time.monotonic()
            sol = solve_instance(deployment, exp, sp, pc, scenario,
                                 options=cfg.solver)
            wall = time.monotonic() - t0
            rows.append(_row_from_solution(sol, deployment, exp, sp, pc,
                                           scenario, se, instance, wall))
    return rows


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Solve the whole batch and write results/summary/timings CSVs.

    jobs > 1 farms instances out to a process pool; rows are order-normalized
    afterwards so the CSVs come out identical either way."""
    cfg.validate()
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    if jobs > 1 and cfg.n_instances > 1:
        import concurrent.futures
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_instance_rows,
                                  [cfg] * cfg.n_instances,
                                  range(cfg.n_instances)):
                rows.extend(chunk)
    else:
        for instance in range(cfg.n_instances):
            rows.extend(_instance_rows(cfg, instance))
    failures = [row for row in rows if row.validated is False]

    rows.sort(key=lambda r: (r.scenario, r.se_target, r.instance))
    results_path = out_dir / "results.csv"
    summary_path = out_dir / "summary.csv"
    timings_path = out_dir / "timings.csv"
    _write_results(results_path, rows, cfg.base.M)
    _write_summary(summary_path, rows)
    _write_timings(timings_path, rows)
    return ExperimentResult(rows, results_path, summary_path, timings_path, failures)


def _row_from_solution(sol: Solution, deployment, exp, sp, pc,
                       scenario: int, se: float, instance: int,
                       wall: float) -> ResultRow:
    if not sol.feasible:
        return ResultRow(
            scenario=scenario, se_target=se, instance=instance,
            status=sol.status, validated=None, tpc_max=None,
            tpc_per_op=None, breakdown_per_op=None,
            n_active_aps=None, n_lcs=None, n_dus=None,
            node_count=sol.node_count, lp_iterations=sol.lp_iterations,
            wall_time=wall,
        )
    report = validate(sol, deployment, exp, sp, pc, scenario)
    return ResultRow(
        scenario=scenario, se_target=se, instance=instance,
        status=sol.status, validated=report.ok, tpc_max=sol.tpc_max,
        tpc_per_op=sol.tpc,
        breakdown_per_op=_operator_breakdowns(sol, deployment, pc),
        n_active_aps=int(sol.z.sum()), n_lcs=int(sol.lc.sum()),
        n_dus=int(sol.du.sum()),
        node_count=sol.node_count, lp_iterations=sol.lp_iterations,
        wall_time=wall,
        audit_failures=tuple(c.name for c in report.failures()),
    )


def _results_header(n_ops: int) -> list:
    head = ["scenario", "se_target", "instance", "status", "validated", "tpc_max"]
    head += [f"tpc_op{m}" for m in range(n_ops)]
    for m in range(n_ops):
        head += [f"dispatcher_op{m}", f"radio_op{m}",
                 f"fronthaul_op{m}", f"processing_op{m}"]
    head += ["n_active_aps", "n_lcs", "n_dus", "node_count"]
    return head


def _write_results(path: Path, rows: list, n_ops: int) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_results_header(n_ops))
        for r in rows:
            rec = [r.scenario, _fmt(r.se_target), r.instance, r.status,
                   _fmt(r.validated), _fmt(r.tpc_max)]
            if r.tpc_per_op is None:
                rec += [""] * (5 * n_ops)
            else:
                rec += [_fmt(float(v)) for v in r.tpc_per_op]
                for brk in r.breakdown_per_op:
                    rec += [_fmt(brk.dispatcher), _fmt(brk.radio),
                            _fmt(brk.fronthaul), _fmt(brk.processing)]
            rec += [_fmt(r.n_active_aps), _fmt(r.n_lcs), _fmt(r.n_dus),
                    r.node_count]
            writer.writerow(rec)


def _write_summary(path: Path, rows: list) -> None:
    """Per (scenario, rate target): averages over the optimal instances.

    The breakdown columns average the watt split of each row's costliest
    operator, whose total is exactly the row's tpc_max; stacked, they
    reproduce the avg_tpc_max column.
    """
    keys = sorted({(r.scenario, r.se_target) for r in rows})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([
            "scenario", "se_target", "n_instances", "n_optimal",
            "n_infeasible", "n_timeout", "avg_tpc_max", "avg_dispatcher_w",
            "avg_radio_w", "avg_fronthaul_w", "avg_processing_w",
        ])
        for scenario, se in keys:
            group = [r for r in rows if (r.scenario, r.se_target) == (scenario, se)]
            opt = [r for r in group if r.status == "optimal"]
            n_inf = sum(1 for r in group if r.status == "infeasible")
            n_time = sum(1 for r in group
                         if r.status not in ("optimal", "infeasible"))
            rec = [scenario, _fmt(se), len(group), len(opt), n_inf, n_time]
            if opt:
                worst = [r.breakdown_per_op[int(np.argmax(r.tpc_per_op))]
                         for r in opt]
                rec += [
                    _fmt(float(np.mean([r.tpc_max for r in opt]))),
                    _fmt(float(np.mean([b.dispatcher for b in worst]))),
                    _fmt(float(np.mean([b.radio for b in worst]))),
                    _fmt(float(np.mean([b.fronthaul for b in worst]))),
                    _fmt(float(np.mean([b.processing for b in worst]))),
                ]
            else:
                rec += [""] * 5
            writer.writerow(rec)


def _write_timings(path: Path, rows: list) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scenario", "se_target", "instance",
                         "wall_time_s", "node_count", "lp_iterations"])
        for r in rows:
            writer.writerow([r.scenario, _fmt(r.se_target), r.instance,
                             _fmt(r.wall_time), r.node_count, r.lp_iterations])


@dataclass
class ComparisonReport:
    """Scenario-2 savings over scenario 1 on matching solved cells."""

    pairs: list              # (se_target, instance, tpc1, tpc2)
    missing: list            # keys present in one scenario only
    violations: list         # pairs where tpc2 exceeds tpc1 beyond slack
    savings_by_se: dict      # se_target -> average (tpc1 - tpc2)

    @property
    def ok(self) -> bool:
        return not self.violations


def compare_scenarios(results_csv: str) -> ComparisonReport:
    """Pair scenario-1 and scenario-2 rows; flexibility must never cost
    power, so every paired delta tpc1 - tpc2 must be >= -1e-6."""
    by_key = {}
    with open(results_csv, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            if rec["status"] != "optimal":
                continue
            key = (float(rec["se_target"]), int(rec["instance"]))
            by_key.setdefault(key, {})[int(rec["scenario"])] = float(rec["tpc_max"])
    pairs = []
    missing = []
    violations = []
    deltas = {}
    for key in sorted(by_key):
        have = by_key[key]
        if 1 not in have or 2 not in have:
            missing.append(key)
            continue
        se, instance = key
        tpc1, tpc2 = have[1], have[2]
        pairs.append((se, instance, tpc1, tpc2))
        if tpc1 - tpc2 < -1e-6:
            violations.append((se, instance, tpc1, tpc2))
        deltas.setdefault(se, []).append(tpc1 - tpc2)
    savings = {se: float(np.mean(v)) for se, v in sorted(deltas.items())}
    return ComparisonReport(pairs, missing, violations, savings)
