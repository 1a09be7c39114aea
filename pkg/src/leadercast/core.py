"""Units, rate-to-SINR conversion, and simulation configuration.

Everything downstream computes in linear units (watts, linear SINR).
dB and dBm appear only at I/O boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

__all__ = [
    "SinrTarget",
    "ScaOptions",
    "SystemConfig",
    "min_sinr_target",
    "dbm_to_watts",
    "watts_to_dbm",
    "validate_config",
    "default_config",
    "load_config",
]


@dataclass(frozen=True)
class SinrTarget:
    """A minimum SINR requirement, stored in linear units."""

    linear_value: float

    def __post_init__(self):
        if self.linear_value < 0:
            raise ValueError(f"SINR target must be nonnegative, got {self.linear_value}")

    @property
    def db(self) -> float:
        if self.linear_value == 0.0:
            return -math.inf
        return 10.0 * math.log10(self.linear_value)


def min_sinr_target(bits: float, symbols: float) -> SinrTarget:
    """Minimum SINR needed to carry `bits` over `symbols` channel uses.

    Computed as 2**(bits/symbols) - 1, i.e. the inverse of the Shannon
    rate with capacity-achieving signaling and no finite-blocklength
    penalty.
    """
    if symbols <= 0:
        raise ValueError(f"symbols must be positive, got {symbols}")
    if bits < 0:
        raise ValueError(f"bits must be nonnegative, got {bits}")
    return SinrTarget(math.pow(2.0, bits / symbols) - 1.0)


def dbm_to_watts(p_dbm: float) -> float:
    return math.pow(10.0, (p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_watts: float) -> float:
    if p_watts <= 0:
        raise ValueError(f"power must be positive to express in dBm, got {p_watts}")
    return 10.0 * math.log10(p_watts) + 30.0


@dataclass(frozen=True)
class ScaOptions:
    """Iteration controls for the successive convex approximation loop."""

    max_iter: int = 30
    tol: float = 1e-4           # relative objective change
    slack_floor: float = 1e-8   # clamp for linearization points entering denominators
    grad_cap: float = 1e5       # ceiling on penalty-gradient coefficients (conditioning)
    retries: int = 2            # fresh initializations after a solver failure
    solver_tol: float = 1e-7
    solver_max_iter: int = 200


@dataclass(frozen=True)
class SystemConfig:
    """All physical and protocol constants for one simulation setup."""

    num_antennas: int
    num_groups: int
    group_sizes: tuple[int, ...]
    bandwidth_hz: float
    latency_s: float
    phase1_s: float
    phase2_s: float
    bs_power_dbm: float
    user_power_dbm: float
    noise_psd_dbm_hz: float
    bits_per_user: tuple[float, ...]   # flattened, group-major
    cell_radius_m: float
    group_radius_m: float
    donut_inner_m: float
    donut_outer_m: float
    rician_factor: float
    penalty_weights: tuple[float, ...]
    # neighbor-cell activity model: fraction of the BS budget a neighbor
    # spends on its own multicast segment, and how many users per neighbor
    # group relay during the D2D segment
    neighbor_bs_load: float = 0.85
    neighbor_relays_per_group: int = 4
    sca: ScaOptions = field(default_factory=ScaOptions)
    seed: int = 0

    @property
    def num_users(self) -> int:
        return sum(self.group_sizes)

    @property
    def bs_power_w(self) -> float:
        return dbm_to_watts(self.bs_power_dbm)

    @property
    def user_power_w(self) -> float:
        return dbm_to_watts(self.user_power_dbm)

    @property
    def noise_power_w(self) -> float:
        return dbm_to_watts(self.noise_psd_dbm_hz + 10.0 * math.log10(self.bandwidth_hz))

    @property
    def group_offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for k in self.group_sizes:
            out.append(acc)
            acc += k
        return tuple(out)

    def group_slice(self, n: int) -> slice:
        off = self.group_offsets[n]
        return slice(off, off + self.group_sizes[n])

    def group_bits(self, n: int) -> float:
        s = self.group_slice(n)
        return float(sum(self.bits_per_user[s]))

    def with_uniform_bits(self, bits: float) -> "SystemConfig":
        return replace(self, bits_per_user=(float(bits),) * self.num_users)

    def with_seed(self, seed: int) -> "SystemConfig":
        return replace(self, seed=int(seed))


def default_config(
    bits: float = 22.0,
    seed: int = 0,
    donut_inner_m: float = 250.0,
    donut_outer_m: float = 350.0,
) -> SystemConfig:
    """Baseline setup: 8-antenna BS, 6 groups of 8 users, 100 kHz, 1 ms split 0.75/0.25."""
    group_sizes = (8,) * 6
    return SystemConfig(
        num_antennas=8,
        num_groups=6,
        group_sizes=group_sizes,
        bandwidth_hz=1e5,
        latency_s=1e-3,
        phase1_s=0.75e-3,
        phase2_s=0.25e-3,
        bs_power_dbm=43.0,
        user_power_dbm=23.0,
        noise_psd_dbm_hz=-169.0,
        bits_per_user=(float(bits),) * sum(group_sizes),
        cell_radius_m=500.0,
        group_radius_m=20.0,
        donut_inner_m=donut_inner_m,
        donut_outer_m=donut_outer_m,
        rician_factor=4.0,
        penalty_weights=tuple(float(2 ** k) for k in group_sizes),
        seed=seed,
    )


def validate_config(cfg: SystemConfig) -> list[str]:
    """Return a list of invariant violations; empty means the config is valid."""
    v: list[str] = []
    if cfg.num_antennas < 1:
        v.append("num_antennas: must be >= 1")
    if cfg.num_groups < 1:
        v.append("num_groups: must be >= 1")
    if len(cfg.group_sizes) != cfg.num_groups:
        v.append("group_sizes: length must equal num_groups")
    if any(k < 1 for k in cfg.group_sizes):
        v.append("group_sizes: every group needs at least one user")
    if cfg.phase1_s <= 0:
        v.append("phase1_s: must be positive")
    if cfg.phase2_s <= 0:
        v.append("phase2_s: must be positive")
    if abs(cfg.phase1_s + cfg.phase2_s - cfg.latency_s) > 1e-12 * max(cfg.latency_s, 1e-300):
        v.append("phase1_s/phase2_s: must sum to latency_s")
    if cfg.bandwidth_hz <= 0:
        v.append("bandwidth_hz: must be positive")
    for name in ("bs_power_dbm", "user_power_dbm"):
        if dbm_to_watts(getattr(cfg, name)) <= 0:
            v.append(f"{name}: power must be positive in linear units")
    if len(cfg.bits_per_user) != cfg.num_users:
        v.append("bits_per_user: length must equal total user count")
    if any(b < 0 for b in cfg.bits_per_user):
        v.append("bits_per_user: bits must be nonnegative")
    if cfg.cell_radius_m <= 0:
        v.append("cell_radius_m: must be positive")
    if cfg.group_radius_m <= 0:
        v.append("group_radius_m: must be positive")
    if not (0 <= cfg.donut_inner_m < cfg.donut_outer_m):
        v.append("donut_inner_m/donut_outer_m: need 0 <= inner < outer")
    if cfg.donut_outer_m > cfg.cell_radius_m:
        v.append("donut_outer_m: must not exceed cell_radius_m")
    if cfg.rician_factor <= 0:
        v.append("rician_factor: must be positive")
    if not (0.0 <= cfg.neighbor_bs_load <= 1.0):
        v.append("neighbor_bs_load: must be in [0, 1]")
    if cfg.neighbor_relays_per_group < 0:
        v.append("neighbor_relays_per_group: must be nonnegative")
    if len(cfg.penalty_weights) != cfg.num_groups:
        v.append("penalty_weights: length must equal num_groups")
    elif any(b <= 0 for b in cfg.penalty_weights):
        v.append("penalty_weights: must be strictly positive")
    if cfg.sca.max_iter < 1:
        v.append("sca.max_iter: must be >= 1")
    if cfg.sca.slack_floor <= 0:
        v.append("sca.slack_floor: must be positive")
    return v


# Flat key-value config file schema. One key per line, "key = value";
# lists are comma-separated; '#' starts a comment.
_SCALAR_KEYS = {
    "num_antennas": int,
    "num_groups": int,
    "bandwidth_hz": float,
    "latency_s": float,
    "phase1_s": float,
    "phase2_s": float,
    "bs_power_dbm": float,
    "user_power_dbm": float,
    "noise_psd_dbm_hz": float,
    "cell_radius_m": float,
    "group_radius_m": float,
    "donut_inner_m": float,
    "donut_outer_m": float,
    "rician_factor": float,
    "neighbor_bs_load": float,
    "neighbor_relays_per_group": int,
    "seed": int,
    "sca_max_iter": int,
    "sca_tol": float,
    "sca_slack_floor": float,
    "sca_retries": int,
    "solver_tol": float,
    "solver_max_iter": int,
}
_LIST_KEYS = {"group_sizes": int, "bits_per_user": float, "penalty_weights": float}


def load_config(path: str | Path) -> SystemConfig:
    """Parse the flat key-value config format. Unknown keys are errors.

    Missing keys fall back to the defaults of `default_config`;
    `bits_per_user` and `penalty_weights` accept a single value which is
    expanded uniformly across users/groups.
    """
    raw: dict[str, object] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, val = (part.strip() for part in line.split("=", 1))
        if key in _SCALAR_KEYS:
            raw[key] = _SCALAR_KEYS[key](val)
        elif key in _LIST_KEYS:
            conv = _LIST_KEYS[key]
            raw[key] = [conv(x.strip()) for x in val.split(",") if x.strip()]
        else:
            raise ValueError(f"{path}:{lineno}: unknown config key '{key}'")
    return _config_from_dict(raw)


def _config_from_dict(raw: dict) -> SystemConfig:
    base = default_config()
    sca_kwargs = {}
    for src, dst in [
        ("sca_max_iter", "max_iter"),
        ("sca_tol", "tol"),
        ("sca_slack_floor", "slack_floor"),
        ("sca_retries", "retries"),
        ("solver_tol", "solver_tol"),
        ("solver_max_iter", "solver_max_iter"),
    ]:
        if src in raw:
            sca_kwargs[dst] = raw.pop(src)
    sca = replace(base.sca, **sca_kwargs) if sca_kwargs else base.sca

    fields = {name: getattr(base, name) for name in (
        "num_antennas", "num_groups", "group_sizes", "bandwidth_hz", "latency_s",
        "phase1_s", "phase2_s", "bs_power_dbm", "user_power_dbm", "noise_psd_dbm_hz",
        "bits_per_user", "cell_radius_m", "group_radius_m", "donut_inner_m",
        "donut_outer_m", "rician_factor", "neighbor_bs_load",
        "neighbor_relays_per_group", "penalty_weights", "seed",
    )}
    for key, val in raw.items():
        fields[key] = tuple(val) if isinstance(val, list) else val

    group_sizes = tuple(int(k) for k in fields["group_sizes"])
    fields["group_sizes"] = group_sizes
    num_users = sum(group_sizes)
    bits = fields["bits_per_user"]
    if not isinstance(bits, tuple):
        bits = (float(bits),)
    if len(bits) == 1:
        bits = (float(bits[0]),) * num_users
    fields["bits_per_user"] = tuple(float(b) for b in bits)
    weights = fields["penalty_weights"]
    if "penalty_weights" in raw:
        weights = tuple(float(w) for w in weights)
        if len(weights) == 1:
            weights = (weights[0],) * len(group_sizes)
    else:
        weights = tuple(float(2 ** k) for k in group_sizes)
    fields["penalty_weights"] = weights
    if "num_groups" not in raw:
        fields["num_groups"] = len(group_sizes)
    return SystemConfig(sca=sca, **fields)
