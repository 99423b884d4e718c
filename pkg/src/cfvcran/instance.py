"""Deployment instances: geometry, operator partitions, serialization.

An instance places L access points on a regular grid over a square service
area, drops K single-antenna users uniformly, and partitions APs, DU/LC
stacks and (for the fixed-assignment scenario) users among M operators.
Everything downstream is a deterministic function of (SystemConfig,
instance_index), so an instance is fully identified by its serialized form.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import rng

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """A SystemConfig invariant is violated."""


class SchemaError(ValueError):
    """A serialized deployment does not match the expected schema."""


@dataclass(frozen=True)
class PowerParams:
    """Hardware power figures (watts) feeding the objective coefficients."""

    p_disp: float = 120.0            # cloud dispatcher
    sigma_cool: float = 0.9          # cooling/distribution efficiency
    p_ap_per_antenna: float = 6.8    # idle AP power, per antenna
    p_onu: float = 7.7               # optical network unit at an active AP
    p_olt: float = 20.0              # optical line terminal, per lightpath
    p_proc_du0: float = 20.8         # idle DU processing
    delta_proc_du: float = 74.0      # DU processing slope (W at full GOPS load)
    delta_tr: float = 4.0            # transmit amplifier slope (1/efficiency)


@dataclass(frozen=True)
class FronthaulParams:
    """Fronthaul digitization figures; they set the per-AP bitrate and the
    number of APs one lightpath (wavelength) can carry."""

    f_s: float = 30.72e6     # sampling rate (Hz)
    n_dft: int = 2048        # DFT size
    n_used: int = 1200       # occupied subcarriers
    t_s: float = 71.4e-6     # slot duration (s)
    n_smooth: int = 12       # subcarriers per coherence block (frequency)
    n_slot: int = 16         # slots per coherence block (time)
    r_max: float = 10e9      # lightpath capacity (bit/s)
    n_bits: int = 12         # quantizer resolution per I/Q sample


@dataclass(frozen=True)
class ChannelParams:
    """Propagation and power-allocation knobs for the channel pipeline."""

    pathloss_ref_db: float = -30.5     # channel gain at 1 m (dB)
    pathloss_exp_db: float = 36.7      # dB lost per decade of distance
    shadowing_std_db: float = 4.0      # log-normal shadow fading std (dB)
    asd_deg: float = 15.0              # Gaussian azimuth angular spread (deg)
    antenna_spacing: float = 0.5       # ULA spacing in wavelengths
    noise_figure_db: float = 7.0       # receiver noise figure (dB)
    pa_exponent: float = 0.5           # fractional power-allocation exponent


@dataclass(frozen=True)
class SystemConfig:
    """Static system description shared by every instance of an experiment."""

    L: int = 16                  # access points (grid_dim**2)
    K: int = 8                   # single-antenna users
    W: int = 8                   # DU/LC stacks in the cloud pool
    M: int = 2                   # mobile network operators
    N: int = 4                   # antennas per AP
    grid_dim: int = 4            # APs per grid side
    area_side: float = 1000.0    # service area side (m)
    tau_c: int = 192             # coherence block (samples)
    tau_p: int = 8               # pilot samples per block
    sigma2: Optional[float] = None   # noise power (W); derived when None
    p_max: float = 1.0           # per-AP downlink power budget (W)
    p_pilot: float = 0.1         # uplink pilot power (W)
    bandwidth: float = 20e6      # system bandwidth (Hz)
    w_max: Optional[int] = None  # APs per lightpath; derived when None
    c_max: float = 180.0         # per-DU processing capacity (GOPS)
    gops_x: float = 8.6          # GOPS per AP-user assignment (placeholder, not a measured figure)
    gops_z: float = 60.0         # GOPS per active AP (placeholder, not a measured figure)
    gops_f: float = 22.0         # fixed GOPS per operator cloud (placeholder, not a measured figure)
    power: PowerParams = field(default_factory=PowerParams)
    fronthaul: FronthaulParams = field(default_factory=FronthaulParams)
    channel: ChannelParams = field(default_factory=ChannelParams)
    rng_seed: int = 1
    n_mc: int = 1000             # Monte-Carlo realizations for expectations

    # -- derived quantities ------------------------------------------------

    @property
    def noise_w(self) -> float:
        """Noise power in watts; thermal floor + noise figure when not set."""
        if self.sigma2 is not None:
            return self.sigma2
        noise_dbm = -174.0 + 10.0 * math.log10(self.bandwidth) + self.channel.noise_figure_db
        return 10.0 ** (noise_dbm / 10.0 - 3.0)

    @property
    def ap_bitrate(self) -> float:
        """Fronthaul bitrate of one AP (bit/s): 2 streams of N antennas,
        n_bits per I/Q sample, at the occupied fraction of the sampling rate."""
        fh = self.fronthaul
        return 2.0 * self.N * fh.n_bits * fh.f_s * (fh.n_used / fh.n_dft)

    @property
    def aps_per_wavelength(self) -> int:
        """How many APs one lightpath carries (w_max when set explicitly)."""
        if self.w_max is not None:
            return self.w_max
        return int(self.fronthaul.r_max // self.ap_bitrate)

    @property
    def p_ap_idle(self) -> float:
        """Idle power of one AP (watts)."""
        return self.power.p_ap_per_antenna * self.N

    @property
    def stacks_per_operator(self) -> int:
        return self.W // self.M

    @property
    def aps_per_operator(self) -> int:
        return self.L // self.M

    def validate(self) -> None:
        """Raise ConfigError naming the violated invariant."""
        if self.grid_dim * self.grid_dim != self.L:
            raise ConfigError(f"L={self.L} must equal grid_dim**2={self.grid_dim ** 2}")
        for name in ("L", "W"):
            if getattr(self, name) % self.M != 0:
                raise ConfigError(f"{name}={getattr(self, name)} must be divisible by M={self.M}")
        if self.K < 1:
            raise ConfigError(f"K={self.K} must be >= 1")
        if self.M < 1:
            raise ConfigError(f"M={self.M} must be >= 1")
        if self.N < 1:
            raise ConfigError(f"N={self.N} must be >= 1")
        if not (0 < self.tau_p <= self.tau_c):
            raise ConfigError(f"need 0 < tau_p <= tau_c, got tau_p={self.tau_p}, tau_c={self.tau_c}")
        if self.tau_p < self.K:
            raise ConfigError(
                f"tau_p={self.tau_p} cannot give each of K={self.K} users an orthogonal pilot"
            )
        for name in ("area_side", "p_max", "p_pilot", "bandwidth", "c_max"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.sigma2 is not None and self.sigma2 <= 0:
            raise ConfigError("sigma2 must be positive")
        for name in ("gops_x", "gops_z", "gops_f"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative")
        if not (0 < self.power.sigma_cool <= 1):
            raise ConfigError(f"sigma_cool={self.power.sigma_cool} must be in (0, 1]")
        if self.w_max is not None and self.w_max < 1:
            raise ConfigError(f"w_max={self.w_max} must be >= 1")
        if self.aps_per_wavelength < 1:
            raise ConfigError("lightpath capacity r_max carries less than one AP")
        if self.n_mc < 1:
            raise ConfigError(f"n_mc={self.n_mc} must be >= 1")
        if self.rng_seed < 0:
            raise ConfigError(f"rng_seed={self.rng_seed} must be nonnegative")


@dataclass
class Deployment:
    """One placed instance: positions plus operator partitions.

    ue_owner is the fixed round-robin user-to-operator assignment used by the
    fixed-assignment scenario; the flexible scenario ignores it (it may be
    stripped before serialization, see without_ue_owner).
    """

    config: SystemConfig
    instance_index: int
    ap_positions: np.ndarray        # (L, 2) metres
    ue_positions: np.ndarray        # (K, 2) metres
    ap_owner: np.ndarray            # (L,) operator index per AP
    du_owner: np.ndarray            # (W,) operator index per DU/LC stack
    ue_owner: Optional[np.ndarray]  # (K,) operator index per user, or None

    def aps_of(self, m: int) -> np.ndarray:
        return np.flatnonzero(self.ap_owner == m)

    def stacks_of(self, m: int) -> np.ndarray:
        return np.flatnonzero(self.du_owner == m)

    def ues_of(self, m: int) -> np.ndarray:
        if self.ue_owner is None:
            raise ValueError("deployment has no fixed user-to-operator assignment")
        return np.flatnonzero(self.ue_owner == m)

    def without_ue_owner(self) -> "Deployment":
        """Copy with the fixed user assignment stripped (flexible scenario)."""
        return Deployment(
            config=self.config,
            instance_index=self.instance_index,
            ap_positions=self.ap_positions.copy(),
            ue_positions=self.ue_positions.copy(),
            ap_owner=self.ap_owner.copy(),
            du_owner=self.du_owner.copy(),
            ue_owner=None,
        )

    def canonical_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "config": _config_to_dict(self.config),
            "instance_index": self.instance_index,
            "ap_positions": [[float(v) for v in row] for row in self.ap_positions],
            "ue_positions": [[float(v) for v in row] for row in self.ue_positions],
            "ap_owner": [int(v) for v in self.ap_owner],
            "du_owner": [int(v) for v in self.du_owner],
            "ue_owner": None if self.ue_owner is None else [int(v) for v in self.ue_owner],
        }
        return d

    def canonical_json(self) -> str:
        return json.dumps(self.canonical_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        """Stable content hash, used to key the expectation cache."""
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def _config_to_dict(config: SystemConfig) -> dict:
    d = asdict(config)
    return d


def _config_from_dict(d: dict) -> SystemConfig:
    try:
        power = PowerParams(**d["power"])
        fronthaul = FronthaulParams(**d["fronthaul"])
        channel = ChannelParams(**d["channel"])
        rest = {k: v for k, v in d.items() if k not in ("power", "fronthaul", "channel")}
        return SystemConfig(power=power, fronthaul=fronthaul, channel=channel, **rest)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad config block: {exc}") from exc


def grid_positions(config: SystemConfig) -> np.ndarray:
    """AP positions at the centres of a grid_dim x grid_dim partition of the
    area, row-major (l = row * grid_dim + col)."""
    cell = config.area_side / config.grid_dim
    coords = (np.arange(config.grid_dim) + 0.5) * cell
    rows, cols = np.divmod(np.arange(config.L), config.grid_dim)
    return np.column_stack([coords[cols], coords[rows]])


def checkerboard_owner(config: SystemConfig) -> np.ndarray:
    """Operator index per AP: (row + col) mod M, a checkerboard for M=2."""
    rows, cols = np.divmod(np.arange(config.L), config.grid_dim)
    owner = (rows + cols) % config.M
    counts = np.bincount(owner, minlength=config.M)
    if not np.all(counts == config.aps_per_operator):
        raise ConfigError(
            f"checkerboard split of a {config.grid_dim}x{config.grid_dim} grid "
            f"cannot give each of M={config.M} operators L/M={config.aps_per_operator} APs"
        )
    return owner


def generate_deployment(config: SystemConfig, instance_index: int = 0) -> Deployment:
    """Deterministically place instance `instance_index` of this config.

    AP positions and ownerships do not depend on the seed; user positions
    depend only on (rng_seed, instance_index, user index).
    """
    config.validate()
    if instance_index < 0:
        raise ValueError("instance_index must be nonnegative")
    ap_positions = grid_positions(config)
    ap_owner = checkerboard_owner(config)
    ue_positions = np.empty((config.K, 2))
    for k in range(config.K):
        gen = rng.stream(config.rng_seed, rng.UE_POSITION, substream=k, instance=instance_index)
        ue_positions[k] = gen.uniform(0.0, config.area_side, size=2)
    du_owner = np.arange(config.W) // config.stacks_per_operator
    ue_owner = np.arange(config.K) % config.M
    return Deployment(
        config=config,
        instance_index=instance_index,
        ap_positions=ap_positions,
        ue_positions=ue_positions,
        ap_owner=ap_owner,
        du_owner=du_owner,
        ue_owner=ue_owner,
    )


def save_deployment(deployment: Deployment, path) -> None:
    """Write the canonical JSON form (byte-deterministic, full precision)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(deployment.canonical_json())
        fh.write("\n")


_REQUIRED_KEYS = (
    "schema_version",
    "config",
    "instance_index",
    "ap_positions",
    "ue_positions",
    "ap_owner",
    "du_owner",
    "ue_owner",
)


def load_deployment(path) -> Deployment:
    """Read a deployment file, validating schema and config invariants."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    for key in _REQUIRED_KEYS:
        if key not in raw:
            raise SchemaError(f"missing field: {key}")
    if raw["schema_version"] != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version: {raw['schema_version']}")
    config = _config_from_dict(raw["config"])
    config.validate()
    ap_positions = np.asarray(raw["ap_positions"], dtype=float)
    ue_positions = np.asarray(raw["ue_positions"], dtype=float)
    if ap_positions.shape != (config.L, 2):
        raise SchemaError(f"ap_positions must have shape ({config.L}, 2)")
    if ue_positions.shape != (config.K, 2):
        raise SchemaError(f"ue_positions must have shape ({config.K}, 2)")
    ap_owner = np.asarray(raw["ap_owner"], dtype=int)
    du_owner = np.asarray(raw["du_owner"], dtype=int)
    ue_owner = raw["ue_owner"]
    if ue_owner is not None:
        ue_owner = np.asarray(ue_owner, dtype=int)
        if ue_owner.shape != (config.K,):
            raise SchemaError(f"ue_owner must have length {config.K}")
    if ap_owner.shape != (config.L,):
        raise SchemaError(f"ap_owner must have length {config.L}")
    if du_owner.shape != (config.W,):
        raise SchemaError(f"du_owner must have length {config.W}")
    for name, arr, count in (("ap_owner", ap_owner, None), ("du_owner", du_owner, None)):
        if arr.min() < 0 or arr.max() >= config.M:
            raise SchemaError(f"{name} entries must be in [0, {config.M})")
    return Deployment(
        config=config,
        instance_index=int(raw["instance_index"]),
        ap_positions=ap_positions,
        ue_positions=ue_positions,
        ap_owner=ap_owner,
        du_owner=du_owner,
        ue_owner=ue_owner,
    )
