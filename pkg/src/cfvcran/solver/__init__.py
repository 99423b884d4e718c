"""Exact 0-1 optimization: LP engine, branch and bound, oracles, audits."""

from .simplex import BoundedLp, SimplexError, solve_lp
from .branch_bound import RawSolution, SolverOptions, solve_model
from .planner import Solution, greedy_plan, minimal_stack_counts, operator_tpc, solve_instance
from .brute import BruteResult, brute_force
from .validate import CheckResult, ValidationReport, validate

solve = solve_model

__all__ = [
    "BoundedLp",
    "BruteResult",
    "CheckResult",
    "RawSolution",
    "SimplexError",
    "Solution",
    "SolverOptions",
    "ValidationReport",
    "brute_force",
    "greedy_plan",
    "minimal_stack_counts",
    "operator_tpc",
    "solve",
    "solve_lp",
    "solve_instance",
    "solve_model",
    "validate",
]
