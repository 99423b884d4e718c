"""Correlated Rayleigh channel pipeline.

Large-scale statistics (path loss + log-normal shadowing, local-scattering
spatial correlation), per-realization MMSE channel estimation from orthogonal
pilots, local partial MMSE precoding normalized to unit expected norm,
fractional per-AP power allocation, and Monte-Carlo estimation of the
channel-hardening expectations that parameterize the SINR constraints:

    b[k, l]       = E{ h_kl^H w_kl }                (coherent gain, real > 0)
    C[k, i, l, r] = E{ (h_kl^H w_il)(h_kr^H w_ir)^* }  (second-order products)

The inner products pair the conjugated channel with the precoder so the
coherent gain is real-nonnegative; this is the usual downlink convention and
differs from a transpose-product notation only by conjugating the precoders.

All expectation estimates are sample means over cfg.n_mc realizations; the
precoders are computed as if all K users were served jointly (worst-case
interference), independently of any operator assignment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import rng
from .instance import Deployment, SystemConfig

MODEL_VERSION = 1  # bump when the pipeline changes numerically

_CHUNK = 100  # realizations processed per vectorized block (fixed: the
# accumulation order must not depend on scheduling, so chunk size is constant)


@dataclass
class ChannelStatistics:
    """Large-scale coefficients of one deployment."""

    beta: np.ndarray        # (K, L) average channel gain, linear scale
    R: np.ndarray           # (K, L, N, N) spatial correlation, trace N*beta
    nominal_angle: np.ndarray  # (K, L) azimuth AP->UE (radians), diagnostic


@dataclass
class ChannelRealization:
    """One Monte-Carlo draw: true channels, estimates, normalized precoders."""

    h: np.ndarray       # (K, L, N)
    h_hat: np.ndarray   # (K, L, N)
    w: np.ndarray       # (K, L, N), E{||w_kl||^2} = 1 under the draw ensemble


@dataclass
class ExpectationSet:
    """Monte-Carlo expectations feeding the constraint coefficients.

    p holds square-root powers: p[k, l] = sqrt of the watts AP l would spend
    on user k if it serves it.
    """

    b: np.ndarray               # (K, L) real coherent gains
    C: np.ndarray               # (K, K, L, L) complex, C[k, i] Hermitian
    p: np.ndarray               # (K, L) sqrt allocated powers
    n_mc_used: int
    b_std_err: np.ndarray       # (K, L) MC standard error of b
    b_imag_ratio: float         # max |Im mean| / |Re mean| diagnostic
    quality_warnings: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# large-scale statistics
# ---------------------------------------------------------------------------

def pathloss_db(distance_m: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """Distance-dependent gain in dB, with a 1 m floor on distance."""
    d = np.maximum(np.asarray(distance_m, dtype=float), 1.0)
    ch = cfg.channel
    return ch.pathloss_ref_db - ch.pathloss_exp_db * np.log10(d)


def local_scattering_correlation(beta: float, angle: float, cfg: SystemConfig) -> np.ndarray:
    """Spatial correlation of a half-wavelength ULA under a Gaussian azimuth
    spread, linearized around the nominal angle.

    With phase response exp(j*omega*m*sin(phi)) linearized in the angle
    deviation delta ~ N(0, sigma^2), the (m, n) entry is the Gaussian
    characteristic function evaluated at omega*(m-n)*cos(angle):

        R[m, n] = beta * exp(j w d sin) * exp(-(sigma^2/2) (w d cos)^2),
        w = 2 pi spacing, d = m - n.

    Diagonal entries equal beta exactly, so trace(R) = N * beta.
    """
    n = cfg.N
    ch = cfg.channel
    omega = 2.0 * np.pi * ch.antenna_spacing
    sigma = np.deg2rad(ch.asd_deg)
    delta = np.arange(n)[:, None] - np.arange(n)[None, :]
    phase = omega * delta * np.sin(angle)
    damping = 0.5 * (sigma * omega * delta * np.cos(angle)) ** 2
    return beta * np.exp(1j * phase - damping)


def compute_statistics(deployment: Deployment) -> ChannelStatistics:
    """Large-scale gains and correlation matrices for one deployment.

    Shadow fading is drawn from the per-user SHADOWING streams, so statistics
    are a pure function of (config, instance_index).
    """
    cfg = deployment.config
    diff = deployment.ue_positions[:, None, :] - deployment.ap_positions[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    angle = np.arctan2(diff[..., 1], diff[..., 0])  # AP -> UE azimuth

    shadow = np.empty((cfg.K, cfg.L))
    for k in range(cfg.K):
        gen = rng.stream(cfg.rng_seed, rng.SHADOWING, substream=k,
                         instance=deployment.instance_index)
        shadow[k] = gen.standard_normal(cfg.L) * cfg.channel.shadowing_std_db

    beta = 10.0 ** ((pathloss_db(dist, cfg) + shadow) / 10.0)

    R = np.empty((cfg.K, cfg.L, cfg.N, cfg.N), dtype=complex)
    for k in range(cfg.K):
        for l in range(cfg.L):
            R[k, l] = local_scattering_correlation(beta[k, l], angle[k, l], cfg)
    return ChannelStatistics(beta=beta, R=R, nominal_angle=angle)


# ---------------------------------------------------------------------------
# power allocation
# ---------------------------------------------------------------------------

def fractional_power_allocation(stats: ChannelStatistics, cfg: SystemConfig) -> np.ndarray:
    """Per-AP budget split across users proportionally to beta**nu.

    Returns watts (K, L); each column sums to p_max.
    """
    nu = cfg.channel.pa_exponent
    weights = stats.beta ** nu
    return cfg.p_max * weights / weights.sum(axis=0, keepdims=True)


# ---------------------------------------------------------------------------
# estimation / precoding operators
# ---------------------------------------------------------------------------

@dataclass
class _Operators:
    """Per-deployment matrices reused by every realization."""

    sqrt_r: np.ndarray    # (K, L, N, N) correlation square roots
    est_gain: np.ndarray  # (K, L, N, N) maps pilot observation -> MMSE estimate
    err_cov: np.ndarray   # (K, L, N, N) estimation error covariance
    err_mix: np.ndarray   # (L, N, N) sum_i p_il * err_cov_il
    p_alloc: np.ndarray   # (K, L) watts


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    """Hermitian square root with relative eigen-clipping at 1e-12."""
    vals, vecs = np.linalg.eigh(mat)
    top = vals[..., -1]
    floor = 1e-12 * np.maximum(top, 0.0)
    vals = np.where(vals < floor[..., None], 0.0, vals)
    return (vecs * np.sqrt(vals)[..., None, :]) @ np.conj(np.swapaxes(vecs, -1, -2))


def build_operators(stats: ChannelStatistics, cfg: SystemConfig) -> _Operators:
    if cfg.tau_p < cfg.K:
        raise ValueError(
            f"orthogonal pilots need tau_p >= K, got tau_p={cfg.tau_p}, K={cfg.K}"
        )
    sigma2 = cfg.noise_w
    q = cfg.p_pilot * cfg.tau_p
    eye = np.eye(cfg.N)
    # Psi = q R + sigma^2 I  (unique pilots: only the user itself contributes)
    psi = q * stats.R + sigma2 * eye
    est_gain = np.sqrt(q) * np.einsum(
        "klij,kljn->klin", stats.R, np.linalg.inv(psi)
    )
    err_cov = stats.R - np.sqrt(q) * np.einsum("klij,kljn->klin", est_gain, stats.R)
    p_alloc = fractional_power_allocation(stats, cfg)
    err_mix = np.einsum("kl,klij->lij", p_alloc, err_cov)
    return _Operators(
        sqrt_r=_psd_sqrt(stats.R),
        est_gain=est_gain,
        err_cov=err_cov,
        err_mix=err_mix,
        p_alloc=p_alloc,
    )


def _draw_block(ops: _Operators, cfg: SystemConfig, instance: int, t0: int, t1: int):
    """Channels and estimates for realizations t0..t1-1, leading axis t.

    Each realization has its own CHANNEL stream drawing, in fixed order, the
    channel innovations then the pilot noise, so any t can be replayed.
    """
    k, l, n = ops.sqrt_r.shape[0], ops.sqrt_r.shape[1], ops.sqrt_r.shape[2]
    nt = t1 - t0
    g = np.empty((nt, k, l, n), dtype=complex)
    noise = np.empty((nt, k, l, n), dtype=complex)
    for j, t in enumerate(range(t0, t1)):
        gen = rng.stream(cfg.rng_seed, rng.CHANNEL, substream=t, instance=instance)
        g[j] = rng.complex_normal(gen, (k, l, n))
        noise[j] = rng.complex_normal(gen, (k, l, n))
    h = np.einsum("klij,tklj->tkli", ops.sqrt_r, g)
    q = cfg.p_pilot * cfg.tau_p
    obs = np.sqrt(q) * h + np.sqrt(cfg.noise_w) * noise
    h_hat = np.einsum("klij,tklj->tkli", ops.est_gain, obs)
    return h, h_hat


def lp_mmse_precoder(h_hat: np.ndarray, ops: _Operators, cfg: SystemConfig) -> np.ndarray:
    """Unnormalized local partial MMSE precoders for one realization.

    For AP l:  w_kl = p_kl * (sum_i p_il (h_hat_il h_hat_il^H + E_il)
                              + sigma^2 I)^(-1) h_hat_kl
    h_hat has shape (K, L, N); returns the same shape.
    """
    return _precoder_block(h_hat[None], ops, cfg)[0]


def _precoder_block(h_hat: np.ndarray, ops: _Operators, cfg: SystemConfig) -> np.ndarray:
    p = ops.p_alloc
    gram = np.einsum("kl,tkli,tklj->tlij", p, h_hat, np.conj(h_hat))
    a = gram + ops.err_mix + cfg.noise_w * np.eye(cfg.N)
    rhs = np.transpose(h_hat, (0, 2, 3, 1))     # (t, L, N, K)
    sol = np.linalg.solve(a, rhs)               # (t, L, N, K)
    return np.transpose(sol, (0, 3, 1, 2)) * p[None, :, :, None]


def precoder_norm_factors(stats: ChannelStatistics, cfg: SystemConfig,
                          instance: int, n_mc: Optional[int] = None,
                          ops: Optional[_Operators] = None) -> np.ndarray:
    """sqrt(E{||w_kl||^2}) over n_mc realizations (the normalization pass)."""
    if ops is None:
        ops = build_operators(stats, cfg)
    if n_mc is None:
        n_mc = cfg.n_mc
    acc = np.zeros((cfg.K, cfg.L))
    for t0 in range(0, n_mc, _CHUNK):
        t1 = min(t0 + _CHUNK, n_mc)
        _, h_hat = _draw_block(ops, cfg, instance, t0, t1)
        w = _precoder_block(h_hat, ops, cfg)
        acc += np.einsum("tkli,tkli->kl", w, np.conj(w)).real
    norms = np.sqrt(acc / n_mc)
    norms[norms == 0.0] = 1.0
    return norms


def draw_realization(stats: ChannelStatistics, cfg: SystemConfig, t: int,
                     instance: int = 0,
                     norm_factors: Optional[np.ndarray] = None) -> ChannelRealization:
    """Replay Monte-Carlo realization t of a deployment.

    norm_factors defaults to a fresh normalization pass over cfg.n_mc draws;
    pass them in when drawing repeatedly.
    """
    ops = build_operators(stats, cfg)
    if norm_factors is None:
        norm_factors = precoder_norm_factors(stats, cfg, instance, ops=ops)
    h, h_hat = _draw_block(ops, cfg, instance, t, t + 1)
    w = _precoder_block(h_hat, ops, cfg) / norm_factors[None, :, :, None]
    return ChannelRealization(h=h[0], h_hat=h_hat[0], w=w[0])


# ---------------------------------------------------------------------------
# expectation estimation
# ---------------------------------------------------------------------------

def estimate_expectations(stats: ChannelStatistics, cfg: SystemConfig,
                          instance: int = 0,
                          n_mc: Optional[int] = None) -> ExpectationSet:
    """Sample-mean estimates of the coherent gains b and product moments C.

    Two passes over the same realizations: the first measures precoder norms,
    the second accumulates G[k, i, l] = h_kl^H w_il statistics.  Accumulation
    is chunked in a fixed order, so the result does not depend on scheduling.
    """
    if n_mc is None:
        n_mc = cfg.n_mc
    ops = build_operators(stats, cfg)
    norms = precoder_norm_factors(stats, cfg, instance, n_mc=n_mc, ops=ops)

    k_, l_ = cfg.K, cfg.L
    sum_g = np.zeros((k_, k_, l_), dtype=complex)
    sum_c = np.zeros((k_, k_, l_, l_), dtype=complex)
    sum_re2 = np.zeros((k_, l_))  # squared real parts of G[k,k,l] for std err
    for t0 in range(0, n_mc, _CHUNK):
        t1 = min(t0 + _CHUNK, n_mc)
        h, h_hat = _draw_block(ops, cfg, instance, t0, t1)
        w = _precoder_block(h_hat, ops, cfg) / norms[None, :, :, None]
        g = np.einsum("tkln,tiln->tkil", np.conj(h), w)
        sum_g += g.sum(axis=0)
        sum_c += np.einsum("tkil,tkir->kilr", g, np.conj(g))
        diag = g[:, np.arange(k_), np.arange(k_), :]
        sum_re2 += (diag.real ** 2).sum(axis=0)

    mean_g = sum_g / n_mc
    c = sum_c / n_mc
    # enforce per-matrix Hermitianity (removes accumulation dust)
    c = 0.5 * (c + np.conj(np.swapaxes(c, -1, -2)))

    diag_mean = mean_g[np.arange(k_), np.arange(k_), :]
    b = diag_mean.real.copy()
    var_re = np.maximum(sum_re2 / n_mc - diag_mean.real ** 2, 0.0)
    b_std_err = np.sqrt(var_re / n_mc)

    warnings: list = []
    scale = np.abs(diag_mean.real)
    imag_ratio = float(np.max(np.abs(diag_mean.imag) / np.maximum(scale, 1e-300)))
    if imag_ratio > 0.01:
        warnings.append(
            f"imaginary residual of coherent gain reaches {imag_ratio:.3g} of the real part"
        )
    if np.any(b < 0):
        warnings.append(f"{int(np.sum(b < 0))} coherent gain entries are negative")

    return ExpectationSet(
        b=b,
        C=c,
        p=np.sqrt(ops.p_alloc),
        n_mc_used=n_mc,
        b_std_err=b_std_err,
        b_imag_ratio=imag_ratio,
        quality_warnings=warnings,
    )


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

def expectation_cache_key(deployment: Deployment, n_mc: int) -> str:
    return f"{deployment.digest()[:24]}_n{n_mc}_v{MODEL_VERSION}"


def save_expectations(exp: ExpectationSet, path) -> None:
    meta = json.dumps({
        "n_mc_used": exp.n_mc_used,
        "model_version": MODEL_VERSION,
        "b_imag_ratio": exp.b_imag_ratio,
        "quality_warnings": exp.quality_warnings,
    })
    np.savez(
        path,
        b=exp.b,
        C=exp.C,
        p=exp.p,
        b_std_err=exp.b_std_err,
        meta=np.array(meta),
    )


def load_expectations(path) -> ExpectationSet:
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        return ExpectationSet(
            b=data["b"],
            C=data["C"],
            p=data["p"],
            n_mc_used=int(meta["n_mc_used"]),
            b_std_err=data["b_std_err"],
            b_imag_ratio=float(meta["b_imag_ratio"]),
            quality_warnings=list(meta["quality_warnings"]),
        )
