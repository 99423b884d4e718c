"""Depth-first branch and bound for 0-1 programs over a single live LP.

The relaxation is kept hot: branching tightens one variable's bounds and
reoptimizes with the dual simplex; unwinding restores the bounds, after which
the point is primal feasible again and a primal cleanup suffices.  No LP is
ever copied.

Branching covers the binaries plus any caller-declared implied-integral
continuous variables (counts pinned to binary sums by equality rows); those
take floor/ceil children, which never excludes a point with integral
binaries but commits whole groups of binaries at once and is what makes the
relaxation bound move early in the dive.

Selection rules are deterministic so node counts are reproducible:
most-fractional branching with ties broken by smallest variable index, and
the first child explored is the one matching the rounded LP value.  Callers
can rank variables with branch priorities (higher first), which lets the
planner fix structurally heavy decisions like AP activation before the
variables they imply.  Integral LP optima are certified by fixing every
binary at its rounded value and reoptimizing the remaining continuous
variables, which also yields the exact objective used for the incumbent.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..milp.model import IlpModel
from .simplex import (
    INFEASIBLE,
    ITERATION_LIMIT,
    OPTIMAL,
    UNBOUNDED,
    BoundedLp,
    SimplexError,
)

_INT_TOL = 1e-6
_NODE_LOG_CAP = 10_000


@dataclass
class SolverOptions:
    """Knobs for the exact solver."""

    time_limit: Optional[float] = None
    node_limit: Optional[int] = None
    gap_abs: float = 1e-10
    max_lp_iter: int = 500_000
    log_nodes: bool = False
    use_warm_start: bool = True


@dataclass
class RawSolution:
    """Solver outcome on the raw variable vector of an IlpModel."""

    status: str
    objective: Optional[float]
    values: Optional[np.ndarray]
    bound: float
    node_count: int
    wall_time: float
    lp_iterations: int = 0
    node_log: list = field(default_factory=list)


class _Stop(Exception):
    def __init__(self, reason: str, bound: float):
        self.reason = reason
        self.bound = bound


class _Search:
    def __init__(self, lp: BoundedLp, bin_ids: np.ndarray, c: np.ndarray, opts: SolverOptions, t0: float,
                 priority: Optional[np.ndarray] = None,
                 integral_ids: Optional[np.ndarray] = None):
        self.lp = lp
        self.bin_ids = bin_ids
        self.n_bin = len(bin_ids)
        extra = np.asarray([] if integral_ids is None else integral_ids, dtype=int)
        self.branch_ids = np.concatenate([bin_ids, extra]).astype(int)
        self.c = c
        self.opts = opts
        self.t0 = t0
        self.prio = None if priority is None else np.asarray(priority)[self.branch_ids]
        self.incumbent_obj = np.inf
        self.incumbent_x: Optional[np.ndarray] = None
        self.node_count = 0
        self.pending: list = []
        self.node_log: list = []

    def _log(self, depth: int, event: str, value) -> None:
        if len(self.node_log) < _NODE_LOG_CAP:
            self.node_log.append((depth, event, value))

    def _check_limits(self) -> None:
        # the bound over everything still open is the weakest pending parent
        # bound; capture it here because the stack unwinds on the way out
        if self.opts.node_limit is not None and self.node_count >= self.opts.node_limit:
            raise _Stop("node_limit", min(self.pending, default=-np.inf))
        if self.opts.time_limit is not None and time.monotonic() - self.t0 > self.opts.time_limit:
            raise _Stop("timeout", min(self.pending, default=-np.inf))

    def _accept(self, rounded: np.ndarray, depth: int) -> None:
        saves = [self.lp.get_bound(j) for j in self.bin_ids]
        for j, v in zip(self.bin_ids, rounded):
            self.lp.set_bound(int(j), float(v), float(v))
        status = self.lp.reoptimize()
        if status == OPTIMAL:
            obj = self.lp.objective()
            if obj < self.incumbent_obj:
                self.incumbent_obj = obj
                self.incumbent_x = self.lp.solution().copy()
                self._log(depth, "incumbent", obj)
        else:
            self._log(depth, "candidate_rejected", status)
        for j, sv in zip(self.bin_ids, saves):
            self.lp.set_bound(int(j), *sv)

    def dive(self, depth: int) -> float:
        """Explore the subtree at the current LP bounds; returns its bound."""
        self._check_limits()
        self.node_count += 1
        status = self.lp.reoptimize()
        if status == ITERATION_LIMIT:
            raise SimplexError("LP iteration limit hit inside the tree")
        if status == UNBOUNDED:
            raise SimplexError("relaxation unbounded inside the tree")
        if status == INFEASIBLE:
            self._log(depth, "infeasible", None)
            return np.inf
        obj = self.lp.objective()
        if obj >= self.incumbent_obj - self.opts.gap_abs:
            self._log(depth, "pruned", obj)
            return obj
        x = self.lp.solution()
        xb = x[self.branch_ids]
        frac = np.abs(xb - np.round(xb))
        if frac[: self.n_bin].max(initial=0.0) <= _INT_TOL:
            # binaries decide the plan; the count aggregates are equality
            # pinned to binary sums, so they are integral here too
            self._accept(np.round(xb[: self.n_bin]), depth)
            return obj
        cand = np.flatnonzero(frac > _INT_TOL)
        if self.prio is not None:
            cand = cand[self.prio[cand] == self.prio[cand].max()]
        pick = int(cand[np.argmax(frac[cand])])
        j = int(self.branch_ids[pick])
        v = float(xb[pick])
        save = self.lp.get_bound(j)
        down = (save[0], float(np.floor(v)))
        up = (float(np.ceil(v)), save[1])
        first, second = (up, down) if v - np.floor(v) >= 0.5 else (down, up)
        self._log(depth, "branch", (j, v))
        self.pending.append(obj)
        try:
            self.lp.set_bound(j, *first)
            self.dive(depth + 1)
            if obj < self.incumbent_obj - self.opts.gap_abs:
                self.lp.set_bound(j, *second)
                self.dive(depth + 1)
        finally:
            self.pending.pop()
            self.lp.set_bound(j, *save)
        return obj


def solve_model(
    model: IlpModel,
    options: Optional[SolverOptions] = None,
    warm_start: Optional[np.ndarray] = None,
    branch_priority: Optional[np.ndarray] = None,
    branch_integral: Optional[np.ndarray] = None,
) -> RawSolution:
    """Exactly minimize a validated 0-1 model, optionally seeded with a
    known feasible point used as the initial incumbent.  branch_priority
    ranks variables for branching (higher first, ties most-fractional).
    branch_integral names continuous variables that are integral at every
    point with integral binaries (e.g. counts pinned to binary sums); the
    search may branch floor/ceil on them, which never cuts off an integral
    point but moves whole groups of binaries at once."""
    opts = options or SolverOptions()
    model.validate()
    t0 = time.monotonic()
    a, senses, b = model.constraint_matrix()
    lb, ub = model.bounds()
    c = model.objective_vector()
    bin_ids = np.asarray(model.binary_ids(), dtype=int)

    lp = BoundedLp(c, a, senses, b, lb, ub, max_iter=opts.max_lp_iter)
    search = _Search(lp, bin_ids, c, opts, t0, priority=branch_priority,
                     integral_ids=branch_integral)

    if warm_start is not None and opts.use_warm_start:
        v = np.asarray(warm_start, dtype=float)
        if _feasible_point(model, v, lb, ub, bin_ids):
            search.incumbent_obj = float(c @ v)
            search.incumbent_x = v.copy()
            search._log(0, "warm_start", search.incumbent_obj)

    status = "optimal"
    stop_bound = -np.inf
    try:
        search.dive(0)
    except _Stop as stop:
        status = stop.reason
        stop_bound = stop.bound

    wall = time.monotonic() - t0
    if status == "optimal":
        if search.incumbent_x is None:
            return RawSolution(
                status="infeasible",
                objective=None,
                values=None,
                bound=np.inf,
                node_count=search.node_count,
                wall_time=wall,
                lp_iterations=lp.iterations,
                node_log=search.node_log,
            )
        bound = search.incumbent_obj
    else:
        bound = stop_bound
    return RawSolution(
        status=status,
        objective=None if search.incumbent_x is None else search.incumbent_obj,
        values=search.incumbent_x,
        bound=float(bound),
        node_count=search.node_count,
        wall_time=wall,
        lp_iterations=lp.iterations,
        node_log=search.node_log,
    )


def _feasible_point(model: IlpModel, v: np.ndarray, lb, ub, bin_ids, tol: float = 1e-7) -> bool:
    if v.shape != (len(model.variables),):
        return False
    if np.any(v < lb - tol) or np.any(v > ub + tol):
        return False
    if bin_ids.size and np.abs(v[bin_ids] - np.round(v[bin_ids])).max() > tol:
        return False
    violations = np.asarray(model.evaluate(v), dtype=float)
    return violations.size == 0 or float(violations.max()) <= tol
