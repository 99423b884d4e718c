"""Command-line front end.

Subcommands: gen (write a deployment file), solve (one instance, one rate
target), sweep (full experiment batch to CSVs), validate (solve and audit,
nonzero exit on a failed check), export-mps (write the 0-1 program in MPS
exchange form), compare (scenario-1 vs scenario-2 dominance report from a
results CSV).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .channel import compute_statistics, estimate_expectations
from .harness import (ExperimentConfig, compare_scenarios, config_from_json,
                      run_experiment)
from .instance import SystemConfig, generate_deployment, save_deployment
from .milp import build_scenario1, build_scenario2, write_mps
from .program import build_sinr_program, power_coefficients
from .solver import SolverOptions, solve_instance, validate


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, default=None,
                   help="experiment config JSON; its base system is used")
    p.add_argument("--seed", type=int, default=None,
                   help="override the system RNG seed")
    p.add_argument("--instance", type=int, default=0,
                   help="instance index within the seed's stream")


def _add_solve_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", type=int, choices=(1, 2), default=1)
    p.add_argument("--se", type=float, default=1.0,
                   help="spectral-efficiency target (bit/s/Hz)")
    p.add_argument("--time-limit", type=float, default=None,
                   help="solver wall-clock limit in seconds")


def _experiment_config(args) -> ExperimentConfig:
    if args.config is not None:
        cfg = config_from_json(Path(args.config).read_text(encoding="utf-8"))
    else:
        cfg = ExperimentConfig()
    if getattr(args, "seed", None) is not None:
        cfg = dataclasses.replace(
            cfg, base=dataclasses.replace(cfg.base, rng_seed=args.seed))
    return cfg


def _built_instance(args):
    cfg = _experiment_config(args)
    base = cfg.base
    deployment = generate_deployment(base, args.instance)
    exp = estimate_expectations(compute_statistics(deployment), base)
    pc = power_coefficients(base)
    return base, deployment, exp, pc


def _solver_options(args) -> SolverOptions:
    if getattr(args, "time_limit", None) is not None:
        return SolverOptions(time_limit=args.time_limit)
    return SolverOptions()


def _solution_dict(sol) -> dict:
    def arr(a):
        return None if a is None else np.asarray(a).astype(int).tolist()

    return {
        "status": sol.status,
        "objective": sol.objective,
        "tpc": None if sol.tpc is None else [float(v) for v in sol.tpc],
        "tpc_max": sol.tpc_max,
        "breakdown": None if sol.breakdown is None else {
            "dispatcher": sol.breakdown.dispatcher,
            "radio": sol.breakdown.radio,
            "fronthaul": sol.breakdown.fronthaul,
            "processing": sol.breakdown.processing,
        },
        "x": arr(sol.x),
        "z": arr(sol.z),
        "lc": arr(sol.lc),
        "du": arr(sol.du),
        "rho": arr(sol.rho),
        "bound": sol.bound,
        "node_count": sol.node_count,
        "wall_time": sol.wall_time,
        "lp_iterations": sol.lp_iterations,
    }


def _cmd_gen(args) -> int:
    cfg = _experiment_config(args)
    deployment = generate_deployment(cfg.base, args.instance)
    save_deployment(deployment, args.out)
    print(f"wrote {args.out} (digest {deployment.digest()[:16]})")
    return 0


def _cmd_solve(args) -> int:
    base, deployment, exp, pc = _built_instance(args)
    sp = build_sinr_program(exp, base, args.se)
    sol = solve_instance(deployment, exp, sp, pc, args.scenario,
                         options=_solver_options(args))
    text = json.dumps(_solution_dict(sol), indent=2)
    if args.out is not None:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    print(f"status {sol.status}  objective "
          f"{'-' if sol.objective is None else f'{sol.objective:.9g}'}  "
          f"nodes {sol.node_count}")
    if args.out is None:
        print(text)
    return 0


def _cmd_sweep(args) -> int:
    cfg = _experiment_config(args)
    updates = {}
    if args.instances is not None:
        updates["n_instances"] = args.instances
    if args.scenario is not None:
        updates["scenarios"] = (args.scenario,)
    if args.se is not None:
        updates["se_grid"] = (args.se,)
    if args.out is not None:
        updates["output_dir"] = str(args.out)
    if args.no_cache:
        updates["use_cache"] = False
    if args.time_limit is not None:
        updates["solver"] = dataclasses.replace(
            cfg.solver, time_limit=args.time_limit)
    if updates:
        cfg = dataclasses.replace(cfg, **updates)
    result = run_experiment(cfg, jobs=args.jobs)
    print(f"wrote {result.results_path}, {result.summary_path}, "
          f"{result.timings_path} ({len(result.rows)} rows)")
    if not result.ok:
        for row in result.validation_failures:
            print(f"AUDIT FAILED: scenario {row.scenario} se {row.se_target} "
                  f"instance {row.instance}: {', '.join(row.audit_failures)}",
                  file=sys.stderr)
        return 1
    return 0


def _cmd_validate(args) -> int:
    base, deployment, exp, pc = _built_instance(args)
    sp = build_sinr_program(exp, base, args.se)
    sol = solve_instance(deployment, exp, sp, pc, args.scenario,
                         options=_solver_options(args))
    if not sol.feasible:
        print(f"status {sol.status}: nothing to audit")
        return 0
    report = validate(sol, deployment, exp, sp, pc, args.scenario)
    print(report.summary())
    return 0 if report.ok else 1


def _cmd_export_mps(args) -> int:
    base, deployment, exp, pc = _built_instance(args)
    sp = build_sinr_program(exp, base, args.se)
    build = build_scenario1 if args.scenario == 1 else build_scenario2
    model, _ = build(deployment, sp, pc)
    write_mps(model, args.out)
    print(f"wrote {args.out} ({len(model.variables)} columns, "
          f"{len(model.constraints)} rows)")
    return 0


def _cmd_compare(args) -> int:
    report = compare_scenarios(args.results_csv)
    print(f"{len(report.pairs)} paired cells, {len(report.missing)} unmatched")
    for se, saving in report.savings_by_se.items():
        print(f"  se {se}: average saving {saving:.9g} W")
    if report.violations:
        for se, instance, tpc1, tpc2 in report.violations:
            print(f"VIOLATION: se {se} instance {instance}: "
                  f"scenario 2 costs {tpc2:.9g} W > scenario 1 {tpc1:.9g} W",
                  file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfvcran",
        description="energy-aware planning for shared cell-free networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a deployment file")
    _add_instance_flags(p)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="solve one instance")
    _add_instance_flags(p)
    _add_solve_flags(p)
    p.add_argument("--out", type=Path, default=None,
                   help="write the solution as JSON here")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="run an experiment batch")
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--instances", type=int, default=None)
    p.add_argument("--scenario", type=int, choices=(1, 2), default=None,
                   help="restrict to one sharing mode")
    p.add_argument("--se", type=float, default=None,
                   help="restrict to one rate target")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--jobs", type=int, default=1,
                   help="instances solved in parallel")
    p.add_argument("--no-cache", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("validate", help="solve one instance and audit it")
    _add_instance_flags(p)
    _add_solve_flags(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("export-mps", help="write the 0-1 program as MPS")
    _add_instance_flags(p)
    _add_solve_flags(p)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_export_mps)

    p = sub.add_parser("compare", help="scenario dominance report")
    p.add_argument("results_csv", type=Path)
    p.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
