"""Independent feasibility audit of a decoded solution.

Re-derives every planning requirement from the deployment, the channel
expectations and the power figures; never consults the constraint rows the
optimizer saw.  Rate targets are checked in ratio form with a relative slack
of 1e-6, everything else exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..instance import Deployment
from ..channel import ExpectationSet
from ..program import PowerCoefficients, SinrProgram, gops_load, sinr_from_assignment, tpc_of
from .planner import Solution

SINR_REL_SLACK = 1e-6
_TPC_TOL = 1e-6


@dataclass
class CheckResult:
    name: str
    ok: bool
    margin: float
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            state = "ok" if c.ok else "FAIL"
            extra = f" ({c.detail})" if c.detail else ""
            lines.append(f"{state:4s} {c.name}: margin={c.margin:.3e}{extra}")
        return "\n".join(lines)

    def _add(self, name, ok, margin, detail=""):
        self.checks.append(CheckResult(name, bool(ok), float(margin), detail))


def validate(
    solution: Solution,
    deployment: Deployment,
    exp: ExpectationSet,
    sp: SinrProgram,
    pc: PowerCoefficients,
    scenario: int,
) -> ValidationReport:
    report = ValidationReport()
    if not solution.feasible:
        report._add("has_solution", False, -1.0, f"status={solution.status}")
        return report

    cfg = deployment.config
    K, L, M = cfg.K, cfg.L, cfg.M
    x, z, lc, du, rho = solution.x, solution.z, solution.lc, solution.du, solution.rho

    binaries = np.concatenate([x.ravel(), z, lc, du, rho.ravel()]).astype(float)
    int_err = np.abs(binaries - np.round(binaries)).max(initial=0.0)
    report._add("binary_integrality", int_err == 0.0, -int_err)

    served = x.sum(axis=1)
    report._add(
        "coverage", (served >= 1).all(), served.min() - 1,
        "" if (served >= 1).all() else f"unserved users {np.flatnonzero(served < 1).tolist()}",
    )

    used = x.sum(axis=0) > 0
    mismatch = np.flatnonzero(used != (z > 0))
    report._add(
        "activation", mismatch.size == 0, -float(mismatch.size),
        "" if mismatch.size == 0 else f"points {mismatch.tolist()}",
    )

    one_hot = rho.sum(axis=1)
    report._add("operator_choice", (one_hot == 1).all(), float(one_hot.min() - 1))
    stray = 0
    for k in range(K):
        m = int(np.argmax(rho[k]))
        foreign = [l for l in range(L) if x[k, l] and deployment.ap_owner[l] != m]
        stray += len(foreign)
    report._add("single_operator_serving", stray == 0, -float(stray))
    if scenario == 1:
        home = np.asarray(deployment.ue_owner, dtype=int)
        moved = int((np.argmax(rho, axis=1) != home).sum())
        report._add("home_operator_kept", moved == 0, -float(moved))

    wav_margin = np.inf
    lc_margin = np.inf
    du_margin = np.inf
    cap_margin = np.inf
    tpc_err = 0.0
    tpc = np.zeros(M)
    for m in range(M):
        aps = deployment.aps_of(m)
        stacks = deployment.stacks_of(m)
        n_aps = int(z[aps].sum())
        n_lc = int(lc[stacks].sum())
        n_du = int(du[stacks].sum())
        n_assign = int(x[rho[:, m] == 1].sum())
        wav_margin = min(wav_margin, cfg.aps_per_wavelength * len(stacks) - n_aps)
        lc_margin = min(lc_margin, cfg.aps_per_wavelength * n_lc - n_aps)
        cap_margin = min(cap_margin, cfg.c_max * n_du - gops_load(cfg, n_aps, n_assign))
        du_margin = min(du_margin, n_du - n_lc)
        tpc[m], _ = tpc_of(pc, n_aps, n_lc, n_du, n_assign)
        tpc_err = max(tpc_err, abs(tpc[m] - solution.tpc[m]))
    report._add("wavelength_fanout", wav_margin >= 0, wav_margin)
    report._add("line_card_count", lc_margin >= 0, lc_margin)
    report._add("processing_capacity", cap_margin >= -1e-9, cap_margin)
    report._add("line_cards_hosted", du_margin >= 0, du_margin)

    sigma2 = cfg.noise_w
    sinr_margin = np.inf
    worst_user = -1
    for k in range(K):
        g = sp.gamma[k]
        if g <= 0:
            continue
        m = int(np.argmax(rho[k]))
        members = [i for i in range(K) if np.argmax(rho[i]) == m]
        s = sinr_from_assignment(exp, sigma2, k, x, members)
        rel = s / g - 1.0
        if rel < sinr_margin:
            sinr_margin, worst_user = rel, k
    if np.isfinite(sinr_margin):
        report._add(
            "rate_targets", sinr_margin >= -SINR_REL_SLACK, sinr_margin,
            f"worst user {worst_user}",
        )
    else:
        report._add("rate_targets", True, 0.0, "no targets set")

    report._add("power_totals", tpc_err <= _TPC_TOL, _TPC_TOL - tpc_err)
    obj_err = abs(solution.tpc_max - tpc.max())
    if solution.objective is not None:
        obj_err = max(obj_err, abs(solution.objective - tpc.max()))
    report._add("objective_is_worst_operator", obj_err <= _TPC_TOL, _TPC_TOL - obj_err)
    if solution.breakdown is not None:
        part_sum = solution.breakdown.total
        brk_err = abs(part_sum - tpc.max())
        report._add("breakdown_totals", brk_err <= _TPC_TOL, _TPC_TOL - brk_err)
    return report
