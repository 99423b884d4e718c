"""End-to-end solve of one planning instance.

Bridges the domain objects (deployment, channel expectations, linearized
rate constraints, power coefficients) to the generic 0-1 solver: builds the
model for the requested sharing mode, seeds the search with a greedy feasible
plan when one exists, and decodes the raw variable vector back into arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..instance import Deployment
from ..channel import ExpectationSet
from ..milp.builders import VariableIndex, build_scenario1, build_scenario2, decode_assignment
from ..program import (PowerCoefficients, SinrProgram, TpcBreakdown, gops_load,
                       power_coefficients, sinr_from_assignment, tpc_of)
from .branch_bound import RawSolution, SolverOptions, solve_model


@dataclass
class Solution:
    """Decoded optimizer output for one instance."""

    status: str
    objective: Optional[float]
    tpc: Optional[np.ndarray]
    tpc_max: Optional[float]
    breakdown: Optional[TpcBreakdown]
    x: Optional[np.ndarray]
    z: Optional[np.ndarray]
    lc: Optional[np.ndarray]
    du: Optional[np.ndarray]
    rho: Optional[np.ndarray]
    bound: float
    node_count: int
    wall_time: float
    lp_iterations: int
    lp_objective: Optional[float]
    values: Optional[np.ndarray]

    @property
    def feasible(self) -> bool:
        return self.values is not None


def minimal_stack_counts(cfg, n_active_aps: int, n_assignments: int) -> tuple:
    """Fewest OLT line cards and DUs that can carry one operator's traffic:
    line cards bounded by the wavelength fan-out, DUs by processing load and
    by hosting every line card."""
    n_lc = math.ceil(n_active_aps / cfg.aps_per_wavelength)
    load = gops_load(cfg, n_active_aps, n_assignments)
    n_du = max(math.ceil(load / cfg.c_max - 1e-12), n_lc)
    return n_lc, n_du


def operator_tpc(pc: PowerCoefficients, cfg, n_aps: int, n_assignments: int) -> tuple:
    """(total, breakdown, n_lc, n_du) for one operator at minimal stacks."""
    n_lc, n_du = minimal_stack_counts(cfg, n_aps, n_assignments)
    total, breakdown = tpc_of(pc, n_aps, n_lc, n_du, n_assignments)
    return total, breakdown, n_lc, n_du


def greedy_plan(
    deployment: Deployment,
    exp: ExpectationSet,
    sp: SinrProgram,
    scenario: int,
) -> Optional[tuple]:
    """Greedy feasible plan or None: each user starts on its strongest
    allowed transmission point and the worst user below target grows its
    serving set until every target holds.  Returns (x, owner_of_ue)."""
    cfg = deployment.config
    K, L, M = cfg.K, cfg.L, cfg.M
    sigma2 = cfg.noise_w
    strength = exp.b * exp.p  # coherent gain of each candidate link

    if scenario == 1:
        owner = np.asarray(deployment.ue_owner, dtype=int)
    else:
        owner = np.empty(K, dtype=int)
        for k in range(K):
            best = [strength[k, deployment.aps_of(m)].max() for m in range(M)]
            owner[k] = int(np.argmax(best))

    pools = [list(deployment.aps_of(int(owner[k]))) for k in range(K)]
    x = np.zeros((K, L), dtype=np.int8)
    for k in range(K):
        pool = pools[k]
        x[k, pool[int(np.argmax(strength[k, pool]))]] = 1

    members = [[k for k in range(K) if owner[k] == m] for m in range(M)]
    cap = cfg.aps_per_wavelength * (cfg.W // M)

    for _ in range(K * L):
        worst_k, worst_ratio = -1, np.inf
        for k in range(K):
            g = sp.gamma[k]
            if g <= 0:
                continue
            s = sinr_from_assignment(exp, sigma2, k, x, members[int(owner[k])])
            ratio = s / g
            if ratio < worst_ratio:
                worst_k, worst_ratio = k, ratio
        if worst_ratio >= 1.0 + 1e-9:
            break
        k = worst_k
        m = int(owner[k])
        candidates = [l for l in pools[k] if not x[k, l]]
        if not candidates:
            return None
        # adding an already-active transmission point never costs wavelengths
        active = {l for l in pools[k] if x[:, l].any()}
        order = sorted(candidates, key=lambda l: -strength[k, l])
        chosen = None
        for l in order:
            if l in active or len(active) < cap:
                chosen = l
                break
        if chosen is None:
            return None
        x[k, chosen] = 1
    else:
        return None
    _prune_plan(cfg, exp, sp, sigma2, x, owner, members, pools, strength)
    return x, owner


def _prune_plan(cfg, exp, sp, sigma2, x, owner, members, pools, strength) -> None:
    """Cheapen the grown plan in place while every target keeps holding.

    Two moves, repeated to a fixpoint: close a whole transmission point
    (rehoming its users onto points still active, plus patch-up links when
    the group drops below target) and drop single links a user no longer
    needs.  A closure only sticks when the operator's power actually falls,
    so patch-up links can never buy back more than the idle radio saved."""
    pc = power_coefficients(cfg)

    def group_ok(m: int) -> bool:
        for k in members[m]:
            g = sp.gamma[k]
            if g <= 0:
                continue
            s = sinr_from_assignment(exp, sigma2, k, x, members[m])
            if s / g < 1.0 + 1e-9:
                return False
        return True

    def group_tpc(m: int) -> float:
        rows = x[members[m]]
        return operator_tpc(pc, cfg, int(rows.any(axis=0).sum()), int(rows.sum()))[0]

    changed = True
    while changed:
        changed = False
        served = [(float(strength[:, l] @ x[:, l]), l)
                  for l in np.nonzero(x.any(axis=0))[0]]
        for _, l in sorted(served):
            users = np.nonzero(x[:, l])[0]
            if len(users) == 0:
                continue
            tpc_before = group_tpc(int(owner[users[0]]))
            saved = x[:, l].copy()
            added = []
            x[:, l] = 0
            ok = True
            for k in users:
                if x[k].any():
                    continue
                alive = [j for j in pools[k] if j != l and x[:, j].any()]
                if not alive:
                    ok = False
                    break
                j = alive[int(np.argmax(strength[k, alive]))]
                x[k, j] = 1
                added.append((k, j))
            m = int(owner[users[0]])
            while ok and not group_ok(m):
                # a few extra links on surviving points still beat an idle
                # radio; give the worst user its strongest unused live point
                worst_k, worst_ratio = -1, np.inf
                for k in members[m]:
                    g = sp.gamma[k]
                    if g <= 0:
                        continue
                    ratio = sinr_from_assignment(exp, sigma2, k, x, members[m]) / g
                    if ratio < worst_ratio:
                        worst_k, worst_ratio = k, ratio
                cand = [j for j in pools[worst_k]
                        if j != l and not x[worst_k, j] and x[:, j].any()]
                if not cand:
                    ok = False
                    break
                j = cand[int(np.argmax(strength[worst_k, cand]))]
                x[worst_k, j] = 1
                added.append((worst_k, j))
            if ok and group_tpc(m) < tpc_before - 1e-9:
                changed = True
            else:
                x[:, l] = saved
                for k, j in added:
                    x[k, j] = 0
        active = [(float(strength[k, l]), k, l) for k, l in zip(*np.nonzero(x))]
        for _, k, l in sorted(active):
            if x[k].sum() <= 1 or not x[k, l]:
                continue
            x[k, l] = 0
            if group_ok(int(owner[k])):
                changed = True
            else:
                x[k, l] = 1


def assemble_values(
    index: VariableIndex,
    n_vars: int,
    deployment: Deployment,
    pc: PowerCoefficients,
    x: np.ndarray,
    owner: np.ndarray,
) -> np.ndarray:
    """Raw variable vector realizing the plan x with minimal stack usage."""
    cfg = deployment.config
    v = np.zeros(n_vars)
    z = (x.sum(axis=0) > 0).astype(np.int8)
    for (k, l), vid in index.x.items():
        v[vid] = float(x[k, l])
    for l, vid in index.z.items():
        v[vid] = float(z[l])
    for (k, m), vid in index.rho.items():
        v[vid] = 1.0 if int(owner[k]) == m else 0.0
    for (i, l, r), vid in index.a.items():
        v[vid] = float(x[i, l] * x[i, r])
    tpc = np.zeros(cfg.M)
    for m in range(cfg.M):
        aps = deployment.aps_of(m)
        stacks = deployment.stacks_of(m)
        n_aps = int(z[aps].sum())
        n_assign = int(x[np.asarray(owner) == m].sum())
        total, _, n_lc, n_du = operator_tpc(pc, cfg, n_aps, n_assign)
        for w in stacks[:n_lc]:
            v[index.lc[w]] = 1.0
        for w in stacks[:n_du]:
            v[index.du[w]] = 1.0
        if m in index.nap:
            v[index.nap[m]] = float(n_aps)
            v[index.nlc[m]] = float(n_lc)
            v[index.ndu[m]] = float(n_du)
        # match the equality row bit for bit: same terms, same order
        tpc[m] = (
            pc.c1
            + (pc.c2 + pc.c3) * n_aps
            + pc.c4 * n_lc
            + pc.c5 * n_du
            + pc.c6 * n_assign
            + pc.c7
        )
        v[index.tpc[m]] = tpc[m]
    v[index.tpc_max] = tpc.max()
    return v


def branch_priorities(index: VariableIndex, n_vars: int) -> np.ndarray:
    """Branch the per-operator counts before anything else (each step there
    commits a whole radio or stack of cost), then activation, stacks, serving
    and attachment; product variables last (they are implied once the serving
    bits settle)."""
    prio = np.zeros(n_vars, dtype=int)
    for vid in index.nap.values():
        prio[vid] = 5
    for vid in index.nlc.values():
        prio[vid] = 4
    for vid in index.ndu.values():
        prio[vid] = 4
    for vid in index.z.values():
        prio[vid] = 3
    for vid in index.lc.values():
        prio[vid] = 2
    for vid in index.du.values():
        prio[vid] = 2
    for vid in index.x.values():
        prio[vid] = 1
    for vid in index.rho.values():
        prio[vid] = 1
    return prio


def branch_aggregates(index: VariableIndex) -> np.ndarray:
    """Continuous count variables safe for floor/ceil branching."""
    ids = (list(index.nap.values()) + list(index.nlc.values())
           + list(index.ndu.values()))
    return np.asarray(sorted(ids), dtype=int)


def solve_instance(
    deployment: Deployment,
    exp: ExpectationSet,
    sp: SinrProgram,
    pc: PowerCoefficients,
    scenario: int,
    options: Optional[SolverOptions] = None,
    tighten_activation: bool = False,
) -> Solution:
    """Build and exactly solve one instance in the given sharing mode
    (1: users stay on their home operator, 2: users may be reassigned)."""
    if scenario == 1:
        model, index = build_scenario1(deployment, sp, pc, tighten_activation=tighten_activation)
    elif scenario == 2:
        model, index = build_scenario2(deployment, sp, pc, tighten_activation=tighten_activation)
    else:
        raise ValueError(f"scenario must be 1 or 2, got {scenario}")

    opts = options or SolverOptions()
    warm = None
    if opts.use_warm_start:
        plan = greedy_plan(deployment, exp, sp, scenario)
        if plan is not None:
            warm = assemble_values(index, len(model.variables), deployment, pc, *plan)

    raw = solve_model(model, opts, warm_start=warm,
                      branch_priority=branch_priorities(index, len(model.variables)),
                      branch_integral=branch_aggregates(index))
    return _decode(raw, model, index, deployment, pc)


def _decode(
    raw: RawSolution,
    model,
    index: VariableIndex,
    deployment: Deployment,
    pc: PowerCoefficients,
) -> Solution:
    if raw.values is None:
        return Solution(
            status=raw.status,
            objective=None,
            tpc=None,
            tpc_max=None,
            breakdown=None,
            x=None,
            z=None,
            lc=None,
            du=None,
            rho=None,
            bound=raw.bound,
            node_count=raw.node_count,
            wall_time=raw.wall_time,
            lp_iterations=raw.lp_iterations,
            lp_objective=None,
            values=None,
        )
    asg = decode_assignment(index, raw.values, deployment)
    cfg = deployment.config
    x, z, lc, du, rho = asg["x"], asg["z"], asg["lc"], asg["du"], asg["rho"]
    tpc = np.zeros(cfg.M)
    breakdowns = []
    for m in range(cfg.M):
        aps = deployment.aps_of(m)
        stacks = deployment.stacks_of(m)
        n_aps = int(z[aps].sum())
        n_assign = int(x[rho[:, m] == 1].sum())
        total, brk = tpc_of(pc, n_aps, int(lc[stacks].sum()), int(du[stacks].sum()), n_assign)
        tpc[m] = total
        breakdowns.append(brk)
    worst = int(np.argmax(tpc))
    return Solution(
        status=raw.status,
        objective=float(tpc.max()),
        tpc=tpc,
        tpc_max=float(tpc.max()),
        breakdown=breakdowns[worst],
        x=x,
        z=z,
        lc=lc,
        du=du,
        rho=rho,
        bound=raw.bound,
        node_count=raw.node_count,
        wall_time=raw.wall_time,
        lp_iterations=raw.lp_iterations,
        lp_objective=raw.objective,
        values=raw.values,
    )
