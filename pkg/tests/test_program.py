"""Thresholds, linearized rate coefficients, power model.

Frozen constants come from exact rational/high-precision evaluation of the
defining formulas (fractions of the hardware figures, mpmath for the
threshold), independently of the code under test.
"""

import numpy as np
import pytest

import cfvcran as cf
from cfvcran.program import compute_big_m

from conftest import synthetic_expectations

# 2**(se * 192/184) - 1, evaluated at 40 decimal digits
GAMMA_FROZEN = {
    0.25: 0.198200686516850003337081,
    0.5: 0.4356848851694506533823194,
    1.0: 1.061191089504018708657454,
    2.0: 3.248508707450763663202097,
}

# exact fractions of the default hardware figures
C_FROZEN = {
    "c1": 400.0 / 3.0,        # 120 / 0.9
    "c2": 16823.0 / 270.0,    # 27.2 + 7.7 + (74/162) * 60
    "c3": 4.0,                # 4 * 1 W
    "c4": 200.0 / 9.0,        # 20 / 0.9
    "c5": 208.0 / 9.0,        # 20.8 / 0.9
    "c6": 1591.0 / 405.0,     # (74/162) * 8.6
    "c7": 814.0 / 81.0,       # (74/162) * 22
}


# ---------------------------------------------------------------------------
# SINR threshold
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("se,expect", sorted(GAMMA_FROZEN.items()))
def test_sinr_threshold_frozen(se, expect):
    assert cf.sinr_threshold(se, 192, 8) == pytest.approx(expect, abs=1e-12)


def test_sinr_threshold_zero_and_errors():
    assert cf.sinr_threshold(0.0, 192, 8) == 0.0
    with pytest.raises(ValueError):
        cf.sinr_threshold(-1.0, 192, 8)
    with pytest.raises(ValueError):
        cf.sinr_threshold(1.0, 192, 192)


def test_sinr_threshold_monotone():
    gammas = [cf.sinr_threshold(se, 192, 8) for se in np.linspace(0, 3, 13)]
    assert np.all(np.diff(gammas) > 0)


# ---------------------------------------------------------------------------
# power coefficients
# ---------------------------------------------------------------------------

def test_power_coefficients_frozen():
    pc = cf.power_coefficients(cf.SystemConfig())
    for name, expect in C_FROZEN.items():
        assert getattr(pc, name) == pytest.approx(expect, abs=1e-9), name


def test_power_coefficient_structure():
    cfg = cf.SystemConfig()
    pc = cf.power_coefficients(cfg)
    assert pc.c2 == pytest.approx(pc.p_ap_idle + pc.p_onu + pc.ap_proc, rel=1e-15)
    # amplifier slope scales with the per-AP budget
    assert cf.power_coefficients(cf.SystemConfig(p_max=0.25)).c3 == pytest.approx(1.0)


def test_power_coefficients_reject_bad_inputs():
    with pytest.raises(ValueError):
        cf.power_coefficients(cf.SystemConfig(power=cf.PowerParams(sigma_cool=0.0)))
    with pytest.raises(ValueError):
        cf.power_coefficients(cf.SystemConfig(c_max=-5.0))


def test_tpc_hand_case():
    """2 active APs, 1 lightpath, 1 DU, 3 assignments under defaults:
    400/3 + 2 * (16823/270 + 4) + 200/9 + 208/9 + 3 * 1591/405 + 814/81
    = 134912/405 W by exact fraction arithmetic."""
    pc = cf.power_coefficients(cf.SystemConfig())
    total, brk = cf.tpc_of(pc, 2, 1, 1, 3)
    assert total == pytest.approx(134912.0 / 405.0, rel=1e-14)
    assert brk.total == pytest.approx(total, rel=1e-15)


def test_tpc_breakdown_categories():
    pc = cf.power_coefficients(cf.SystemConfig())
    total, brk = cf.tpc_of(pc, 3, 2, 2, 5)
    assert brk.dispatcher == pytest.approx(pc.c1)
    assert brk.radio == pytest.approx(3 * (pc.p_ap_idle + pc.c3))
    assert brk.fronthaul == pytest.approx(3 * pc.p_onu + 2 * pc.c4)
    assert brk.processing == pytest.approx(
        3 * pc.ap_proc + 2 * pc.c5 + 5 * pc.c6 + pc.c7)
    # empty operator still pays dispatcher and fixed processing
    idle_total, idle_brk = cf.tpc_of(pc, 0, 0, 0, 0)
    assert idle_total == pytest.approx(pc.c1 + pc.c7)
    assert idle_brk.radio == 0.0 and idle_brk.fronthaul == 0.0


def test_gops_load_linear():
    cfg = cf.SystemConfig()
    assert cf.gops_load(cfg, 0, 0) == cfg.gops_f
    assert cf.gops_load(cfg, 2, 3) == pytest.approx(
        2 * cfg.gops_z + 3 * cfg.gops_x + cfg.gops_f)


# ---------------------------------------------------------------------------
# linearized rate coefficients
# ---------------------------------------------------------------------------

def _linear_lhs(cbar_k, x):
    """1 + sum_i x_i^T cbar[k, i] x_i for a binary serving matrix x."""
    total = 1.0
    for i in range(x.shape[0]):
        total += x[i] @ cbar_k[i] @ x[i]
    return total


def test_cbar_equivalent_to_ratio_form():
    """The linearized constraint must agree with the ratio-form SINR on
    every binary serving pattern: lhs <= 0 iff SINR >= gamma.  Checked
    through the exact algebraic identity
        lhs = (gamma sigma^2 + gamma I - (gamma + 1) S) / (gamma sigma^2)
    where S is the squared coherent gain and I the interference moment."""
    k, l = 2, 3
    exp = synthetic_expectations(k, l, seed=12)
    sigma2 = 0.8
    gamma = np.array([1.3, 0.7])
    cbar = cf.build_cbar(exp, gamma, sigma2)

    for pattern in range(1, 2 ** (k * l)):
        x = np.array([(pattern >> j) & 1 for j in range(k * l)]).reshape(k, l)
        for kk in range(k):
            if not x[kk].any():
                continue
            rho_k = exp.p[kk] * x[kk]
            signal = float(exp.b[kk] @ rho_k) ** 2
            interf = 0.0
            for i in range(k):
                rho_i = exp.p[i] * x[i]
                interf += float(rho_i @ exp.C[kk, i].real @ rho_i)
            expect = (gamma[kk] * sigma2 + gamma[kk] * interf
                      - (gamma[kk] + 1.0) * signal) / (gamma[kk] * sigma2)
            got = _linear_lhs(cbar[kk], x)
            assert got == pytest.approx(expect, rel=1e-10, abs=1e-10)

            sinr = cf.sinr_from_assignment(exp, sigma2, kk, x, list(range(k)))
            if got < -1e-9:
                assert sinr >= gamma[kk]
            elif got > 1e-9:
                assert sinr < gamma[kk]


def test_cbar_symmetric():
    exp = synthetic_expectations(3, 4, seed=5)
    cbar = cf.build_cbar(exp, np.array([1.0, 2.0, 0.5]), 0.3)
    assert np.allclose(cbar, np.swapaxes(cbar, -1, -2), atol=0, rtol=0)


def test_cbar_skips_unconstrained_users():
    exp = synthetic_expectations(2, 3, seed=8)
    cbar = cf.build_cbar(exp, np.array([0.0, 1.0]), 0.3)
    assert np.all(cbar[0] == 0.0)
    assert np.any(cbar[1] != 0.0)


def test_cbar_input_validation():
    exp = synthetic_expectations(2, 3, seed=8)
    with pytest.raises(ValueError):
        cf.build_cbar(exp, np.ones(3), 0.3)
    with pytest.raises(ValueError):
        cf.build_cbar(exp, np.ones(2), 0.0)


def test_big_m_bounds_constraint_body():
    """big_m must upper-bound 1 + sum a*cbar over every 0-1 choice a; the
    worst case activates exactly the positive coefficients."""
    exp = synthetic_expectations(2, 4, seed=3)
    cbar = cf.build_cbar(exp, np.array([1.1, 0.9]), 0.5)
    gen = np.random.default_rng(0)
    for k in range(2):
        bm = compute_big_m(cbar[k])
        assert bm >= 1.0
        worst = 1.0 + np.sum(np.maximum(cbar[k], 0.0))
        assert bm == pytest.approx(worst, rel=1e-15)
        for _ in range(200):
            mask = gen.integers(0, 2, size=cbar[k].shape)
            assert 1.0 + np.sum(mask * cbar[k]) <= bm + 1e-12


def test_build_sinr_program_zero_target(tiny_exp, tiny_cfg):
    sp = cf.build_sinr_program(tiny_exp, tiny_cfg, 0.0)
    assert sp.cbar is None
    assert np.all(sp.gamma == 0.0)
    assert np.all(sp.big_m == 1.0)


def test_build_sinr_program_shapes(tiny_sp, tiny_cfg):
    assert tiny_sp.gamma.shape == (tiny_cfg.K,)
    assert tiny_sp.cbar.shape == (tiny_cfg.K, tiny_cfg.K, tiny_cfg.L, tiny_cfg.L)
    assert np.all(tiny_sp.big_m >= 1.0)


def test_sinr_from_assignment_single_link():
    exp = synthetic_expectations(1, 1, seed=9)
    x = np.array([[1]])
    sigma2 = 0.7
    got = cf.sinr_from_assignment(exp, sigma2, 0, x, [0])
    rho = exp.p[0, 0]
    signal = (exp.b[0, 0] * rho) ** 2
    denom = rho * exp.C[0, 0, 0, 0].real * rho - signal + sigma2
    assert got == pytest.approx(signal / denom, rel=1e-14)


def test_sinr_from_assignment_nonpositive_denominator():
    exp = synthetic_expectations(1, 1, seed=9)
    exp.C[0, 0, 0, 0] = 0.0  # second moment below squared mean: denom < 0
    got = cf.sinr_from_assignment(exp, 1e-12, 0, np.array([[1]]), [0])
    assert got == np.inf


def test_sinr_ignores_out_of_band_users():
    """Interference only comes from listed band members."""
    exp = synthetic_expectations(2, 2, seed=4)
    x = np.ones((2, 2), dtype=int)
    alone = cf.sinr_from_assignment(exp, 0.5, 0, x, [0])
    shared = cf.sinr_from_assignment(exp, 0.5, 0, x, [0, 1])
    assert shared < alone
