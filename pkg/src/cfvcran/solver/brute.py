"""Exhaustive reference optimizer for small instances.

Enumerates every combination of per-user serving sets (restricted to the
home operator's transmission points in mode 1, any single operator's in
mode 2), derives the cheapest consistent activation and stack counts, checks
feasibility directly on the raw data (ratio-form rate targets, wavelength
fan-out, stack capacities) and keeps the min-max operator power.  It shares
no code with the 0-1 solver beyond the power formula and the ratio-form
rate evaluator, so agreement between the two is meaningful evidence.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..instance import Deployment
from ..channel import ExpectationSet
from ..program import PowerCoefficients, SinrProgram, sinr_from_assignment, tpc_of
from .planner import minimal_stack_counts

_SINR_SLACK = 1e-9


@dataclass
class BruteResult:
    status: str
    objective: Optional[float]
    x: Optional[np.ndarray]
    owner: Optional[np.ndarray]
    tpc: Optional[np.ndarray]
    n_combos: int


def _serving_set_choices(deployment: Deployment, scenario: int) -> list:
    """Per user: list of (operator, tuple of transmission points)."""
    cfg = deployment.config
    choices = []
    for k in range(cfg.K):
        if scenario == 1:
            operators = [int(deployment.ue_owner[k])]
        else:
            operators = list(range(cfg.M))
        opts = []
        for m in operators:
            pool = list(deployment.aps_of(m))
            for mask in range(1, 1 << len(pool)):
                opts.append((m, tuple(pool[i] for i in range(len(pool)) if mask >> i & 1)))
        choices.append(opts)
    return choices


def brute_force(
    deployment: Deployment,
    exp: ExpectationSet,
    sp: SinrProgram,
    pc: PowerCoefficients,
    scenario: int,
    combo_limit: int = 1 << 24,
) -> BruteResult:
    cfg = deployment.config
    K, L, M = cfg.K, cfg.L, cfg.M
    sigma2 = cfg.noise_w
    stacks_per_op = cfg.W // M
    cap = cfg.aps_per_wavelength * stacks_per_op

    choices = _serving_set_choices(deployment, scenario)
    total = math.prod(len(c) for c in choices)
    if total > combo_limit:
        raise ValueError(
            f"{total} serving-set combinations exceed the enumeration budget {combo_limit}"
        )

    ap_owner = np.asarray(deployment.ap_owner, dtype=int)
    best_obj = np.inf
    best: Optional[tuple] = None
    n_combos = 0

    for combo in itertools.product(*choices):
        n_combos += 1
        x = np.zeros((K, L), dtype=np.int8)
        owner = np.empty(K, dtype=int)
        for k, (m, aps) in enumerate(combo):
            owner[k] = m
            x[k, list(aps)] = 1
        z = x.sum(axis=0) > 0

        feasible = True
        tpc = np.zeros(M)
        for m in range(M):
            n_aps = int(z[ap_owner == m].sum())
            if n_aps > cap:
                feasible = False
                break
            n_assign = int(x[owner == m].sum())
            n_lc, n_du = minimal_stack_counts(cfg, n_aps, n_assign)
            if n_du > stacks_per_op:
                feasible = False
                break
            tpc[m], _ = tpc_of(pc, n_aps, n_lc, n_du, n_assign)
        if not feasible:
            continue
        if tpc.max() >= best_obj:
            continue  # rate checks cannot lower the power, skip them

        ok = True
        for k in range(K):
            g = sp.gamma[k]
            if g <= 0:
                continue
            members = [i for i in range(K) if owner[i] == owner[k]]
            if sinr_from_assignment(exp, sigma2, k, x, members) < g * (1 - _SINR_SLACK):
                ok = False
                break
        if ok:
            best_obj = float(tpc.max())
            best = (x.copy(), owner.copy(), tpc.copy())

    if best is None:
        return BruteResult("infeasible", None, None, None, None, n_combos)
    return BruteResult("optimal", best_obj, best[0], best[1], best[2], n_combos)
