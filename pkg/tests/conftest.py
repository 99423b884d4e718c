"""Shared fixtures: one small deployment with cached channel expectations.

Session scope keeps the Monte-Carlo work out of every test; anything that
mutates returned objects must copy them first.
"""

import numpy as np
import pytest

import cfvcran as cf


@pytest.fixture(scope="session")
def tiny_cfg():
    return cf.SystemConfig(
        L=4, grid_dim=2, K=2, W=2, M=2, N=2,
        area_side=500.0, rng_seed=7, n_mc=200,
    )


@pytest.fixture(scope="session")
def tiny_deployment(tiny_cfg):
    return cf.generate_deployment(tiny_cfg, 0)


@pytest.fixture(scope="session")
def tiny_stats(tiny_deployment):
    return cf.compute_statistics(tiny_deployment)


@pytest.fixture(scope="session")
def tiny_exp(tiny_stats, tiny_cfg):
    return cf.estimate_expectations(tiny_stats, tiny_cfg)


@pytest.fixture(scope="session")
def tiny_pc(tiny_cfg):
    return cf.power_coefficients(tiny_cfg)


@pytest.fixture(scope="session")
def tiny_sp(tiny_exp, tiny_cfg):
    return cf.build_sinr_program(tiny_exp, tiny_cfg, 0.5)


def synthetic_expectations(k, l, seed=0, b_scale=1.0):
    """Random but well-formed expectation set: C[k, i] Hermitian PSD with a
    dominant diagonal, b nonnegative, p positive."""
    gen = np.random.default_rng(seed)
    b = np.abs(gen.normal(b_scale, 0.3 * b_scale, size=(k, l)))
    c = np.empty((k, k, l, l), dtype=complex)
    for kk in range(k):
        for ii in range(k):
            raw = gen.normal(size=(l, l)) + 1j * gen.normal(size=(l, l))
            herm = raw @ raw.conj().T / l
            c[kk, ii] = herm
        # self products dominate: mean square at least the squared mean
        c[kk, kk] += np.outer(b[kk], b[kk])
    p = gen.uniform(0.2, 1.0, size=(k, l))
    return cf.ExpectationSet(
        b=b, C=c, p=p, n_mc_used=1,
        b_std_err=np.zeros((k, l)), b_imag_ratio=0.0,
    )
