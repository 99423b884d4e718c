"""From targets and expectations to constraint and objective coefficients.

A spectral-efficiency target becomes a SINR threshold gamma; together with
the Monte-Carlo expectation set it becomes, per user k, a real symmetric
coefficient array cbar[k] over (user, AP, AP) triples such that a serving
pattern x meets the target iff

    sum_i x_i^T cbar[k, i] x_i + 1 <= 0.

The derivation: with rho_i = p_i * x_i elementwise (sqrt powers),

    SINR_k = (b_k . rho_k)^2
             / (sum_i rho_i^T C_ki rho_i - (b_k . rho_k)^2 + sigma^2)

and SINR_k >= gamma_k rearranges, after dividing by gamma_k * sigma^2, to
the quadratic constraint above with

    cbar[k, i] = Re(C_ki) * (p_i p_i^T) / sigma^2                     (i != k)
    cbar[k, k] = Re(C_kk) * (p_k p_k^T) / sigma^2
                 - (gamma_k + 1) / (gamma_k sigma^2) * (b_k b_k^T) * (p_k p_k^T)

followed by symmetrization (A + A^T)/2 (the imaginary parts cancel in the
quadratic form because each C_ki is Hermitian).

The module also houses the power-consumption coefficients of the objective
and the processing-load model of the DU pool.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channel import ExpectationSet
from .instance import SystemConfig


@dataclass
class SinrProgram:
    """Constraint coefficients for one SE target.

    gamma_k = 0 (se_target = 0) means user k has no SINR constraint; cbar is
    None when no user has one.
    """

    se_target: float
    gamma: np.ndarray              # (K,)
    cbar: Optional[np.ndarray]     # (K, K, L, L) real symmetric in (l, r)
    big_m: np.ndarray              # (K,) deactivation constants, >= 1


@dataclass(frozen=True)
class PowerCoefficients:
    """Objective coefficients (watts) and the hardware figures behind them.

    TPC of one operator with n active APs, n_lc lightpaths, n_du DUs and
    n_x AP-user assignments is
        c1 + n * (c2 + c3) + c4 * n_lc + c5 * n_du + c6 * n_x + c7.
    """

    c1: float   # dispatcher, fixed
    c2: float   # per active AP: idle AP + ONU + AP share of DU processing
    c3: float   # per active AP: transmit amplifier at full budget
    c4: float   # per lightpath (OLT)
    c5: float   # per active DU (idle processing)
    c6: float   # per AP-user assignment (processing slope)
    c7: float   # fixed per-operator processing
    p_ap_idle: float
    p_onu: float
    ap_proc: float  # DU-processing watts attributed to one active AP


@dataclass(frozen=True)
class TpcBreakdown:
    """Where one operator's watts go."""

    dispatcher: float
    radio: float
    fronthaul: float
    processing: float

    @property
    def total(self) -> float:
        return self.dispatcher + self.radio + self.fronthaul + self.processing


def sinr_threshold(se_target: float, tau_c: int, tau_p: int) -> float:
    """Invert the downlink SE of a coherence block into a SINR threshold.

    SE = (1 - tau_p/tau_c) log2(1 + SINR), so
    gamma = 2 ** (se_target * tau_c / (tau_c - tau_p)) - 1.
    """
    if se_target < 0:
        raise ValueError("se_target must be nonnegative")
    if tau_p >= tau_c:
        raise ValueError("tau_p must be smaller than tau_c")
    if se_target == 0:
        return 0.0
    return float(2.0 ** (se_target * tau_c / (tau_c - tau_p)) - 1.0)


def build_cbar(exp: ExpectationSet, gamma: np.ndarray, sigma2: float) -> np.ndarray:
    """Real symmetric SINR coefficient array (K, K, L, L).

    Entries for users with gamma_k = 0 are left at zero (no constraint).
    """
    k_, l_ = exp.b.shape
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (k_,):
        raise ValueError(f"gamma must have shape ({k_},)")
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    pp = exp.p[:, :, None] * exp.p[:, None, :]       # (K, L, L) outer products
    cbar = np.zeros((k_, k_, l_, l_))
    for k in range(k_):
        if gamma[k] <= 0:
            continue
        cbar[k] = exp.C[k].real * pp / sigma2
        signal = np.outer(exp.b[k], exp.b[k]) * pp[k]
        cbar[k, k] -= (gamma[k] + 1.0) / (gamma[k] * sigma2) * signal
        cbar[k] = 0.5 * (cbar[k] + np.swapaxes(cbar[k], -1, -2))
    return cbar


def compute_big_m(cbar_k: np.ndarray) -> float:
    """Deactivation constant for one user: 1 + sum of positive coefficients.

    That bounds the left side 1 + sum a * cbar over any binary a, so the
    constraint is void whenever its indicator is off.
    """
    return float(1.0 + np.sum(np.maximum(cbar_k, 0.0)))


def build_sinr_program(exp: ExpectationSet, cfg: SystemConfig, se_target: float) -> SinrProgram:
    """Assemble thresholds, coefficients and deactivation constants."""
    gamma_scalar = sinr_threshold(se_target, cfg.tau_c, cfg.tau_p)
    gamma = np.full(cfg.K, gamma_scalar)
    if gamma_scalar == 0.0:
        return SinrProgram(se_target=se_target, gamma=gamma, cbar=None,
                           big_m=np.ones(cfg.K))
    cbar = build_cbar(exp, gamma, cfg.noise_w)
    big_m = np.array([compute_big_m(cbar[k]) for k in range(cfg.K)])
    return SinrProgram(se_target=se_target, gamma=gamma, cbar=cbar, big_m=big_m)


def sinr_from_assignment(exp: ExpectationSet, sigma2: float, k: int,
                         x: np.ndarray, members: Sequence[int]) -> float:
    """Evaluate the ratio-form SINR of user k directly from expectations.

    x is the binary serving matrix (K, L); members lists the users sharing
    user k's operator band (interference only comes from them).  This is the
    reference evaluator used by the brute-force oracle and the validator; it
    never touches the linearized coefficients.
    """
    rho_k = exp.p[k] * x[k]
    coherent = float(exp.b[k] @ rho_k)
    signal = coherent * coherent
    interf = 0.0
    for i in members:
        rho_i = exp.p[i] * x[i]
        interf += float(rho_i @ exp.C[k, i].real @ rho_i)
    denom = interf - signal + sigma2
    if denom <= 0:
        return float("inf")
    return signal / denom


def power_coefficients(cfg: SystemConfig) -> PowerCoefficients:
    """Objective coefficients from the hardware figures."""
    pw = cfg.power
    if pw.sigma_cool <= 0 or pw.sigma_cool > 1:
        raise ValueError(f"sigma_cool={pw.sigma_cool} must be in (0, 1]")
    if cfg.c_max <= 0:
        raise ValueError("c_max must be positive")
    proc_unit = pw.delta_proc_du / (pw.sigma_cool * cfg.c_max)
    ap_proc = proc_unit * cfg.gops_z
    return PowerCoefficients(
        c1=pw.p_disp / pw.sigma_cool,
        c2=cfg.p_ap_idle + pw.p_onu + ap_proc,
        c3=pw.delta_tr * cfg.p_max,
        c4=pw.p_olt / pw.sigma_cool,
        c5=pw.p_proc_du0 / pw.sigma_cool,
        c6=proc_unit * cfg.gops_x,
        c7=proc_unit * cfg.gops_f,
        p_ap_idle=cfg.p_ap_idle,
        p_onu=pw.p_onu,
        ap_proc=ap_proc,
    )


def tpc_of(pc: PowerCoefficients, n_aps: int, n_lcs: int, n_dus: int,
           n_assignments: int) -> tuple[float, TpcBreakdown]:
    """Total power consumption of one operator and its breakdown.

    Categories: dispatcher (c1); radio (active APs: idle + amplifier);
    fronthaul (ONUs at active APs + OLTs per lightpath); processing
    (everything else: DU load attributed to APs and assignments, idle DUs,
    fixed share).
    """
    breakdown = TpcBreakdown(
        dispatcher=pc.c1,
        radio=n_aps * (pc.p_ap_idle + pc.c3),
        fronthaul=n_aps * pc.p_onu + pc.c4 * n_lcs,
        processing=n_aps * pc.ap_proc + pc.c5 * n_dus + pc.c6 * n_assignments + pc.c7,
    )
    return breakdown.total, breakdown


def gops_load(cfg: SystemConfig, n_aps: int, n_assignments: int) -> float:
    """Processing load (GOPS) one operator puts on its DU pool."""
    return cfg.gops_z * n_aps + cfg.gops_x * n_assignments + cfg.gops_f
