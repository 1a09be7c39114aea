"""Topology generation, channel sampling, and inter-cell interference.

Seven-cell wrap-around layout: a reference cell at the origin surrounded
by six interfering cells on a hexagonal ring. Group centers are drawn
area-uniformly from an annulus around each BS; users are drawn uniformly
from a small disc around their group center.

Reference-cell users are indexed group-major and flattened to a single
index 0..K-1 throughout.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import SystemConfig

__all__ = [
    "Topology",
    "ChannelSet",
    "generate_topology",
    "macro_path_gain_db",
    "d2d_path_gain_db",
    "sample_channels",
    "sample_interference",
    "sample_realization",
    "dump_realization",
    "load_realization",
]

NUM_CELLS = 7
DUMP_FORMAT_VERSION = 1


def macro_path_gain_db(d_km: float) -> float:
    """Macro (BS-to-user and inter-group D2D) path gain in dB, distance in km."""
    if np.any(np.asarray(d_km) <= 0):
        raise ValueError("distance must be positive")
    return -128.1 - 36.7 * np.log10(d_km)


def d2d_path_gain_db(d_km: float) -> float:
    """Intra-group D2D path gain in dB, distance in km (indoor model)."""
    if np.any(np.asarray(d_km) <= 0):
        raise ValueError("distance must be positive")
    return -76.8 - 18.7 * np.log10(d_km)


def _amp_gain(gain_db):
    """dB power gain -> linear amplitude gain."""
    return 10.0 ** (np.asarray(gain_db) / 20.0)


@dataclass(frozen=True)
class Topology:
    """Planar positions (meters) for all 7 cells.

    bs_positions: (7, 2); index 0 is the reference cell.
    group_centers: (7, N, 2).
    user_positions: list over cells of list over groups of (K_n, 2) arrays.
    """

    bs_positions: np.ndarray
    group_centers: np.ndarray
    user_positions: list

    def reference_users(self) -> np.ndarray:
        """Flattened (K, 2) positions of reference-cell users, group-major."""
        return np.concatenate(self.user_positions[0], axis=0)


def generate_topology(cfg: SystemConfig, rng: np.random.Generator) -> Topology:
    if cfg.donut_inner_m >= cfg.donut_outer_m:
        raise ValueError("donut inner radius must be smaller than outer radius")
    ring_radius = 2.0 * cfg.cell_radius_m * math.cos(math.pi / 6.0)
    angles = np.arange(6) * (math.pi / 3.0)
    bs = np.zeros((NUM_CELLS, 2))
    bs[1:, 0] = ring_radius * np.cos(angles)
    bs[1:, 1] = ring_radius * np.sin(angles)

    centers = np.zeros((NUM_CELLS, cfg.num_groups, 2))
    users: list = []
    for c in range(NUM_CELLS):
        # area-uniform annulus: radius is sqrt of uniform in [r_in^2, r_out^2]
        r2 = rng.uniform(cfg.donut_inner_m ** 2, cfg.donut_outer_m ** 2, cfg.num_groups)
        # groups occupy distinct work areas: one random center per angular
        # sector (random common rotation, jitter inside the sector) so two
        # groups cannot overlap and jam each other's relay phase
        sector = 2.0 * math.pi / cfg.num_groups
        theta = (rng.uniform(0.0, 2.0 * math.pi)
                 + sector * (np.arange(cfg.num_groups)
                             + rng.uniform(1 / 6, 5 / 6, cfg.num_groups)))
        r = np.sqrt(r2)
        centers[c, :, 0] = bs[c, 0] + r * np.cos(theta)
        centers[c, :, 1] = bs[c, 1] + r * np.sin(theta)
        cell_users = []
        for n in range(cfg.num_groups):
            kn = cfg.group_sizes[n]
            ur = cfg.group_radius_m * np.sqrt(rng.uniform(0.0, 1.0, kn))
            ut = rng.uniform(0.0, 2.0 * math.pi, kn)
            pos = np.stack([centers[c, n, 0] + ur * np.cos(ut),
                            centers[c, n, 1] + ur * np.sin(ut)], axis=1)
            cell_users.append(pos)
        users.append(cell_users)
    return Topology(bs_positions=bs, group_centers=centers, user_positions=users)


@dataclass(frozen=True)
class ChannelSet:
    """One realization of all channels and interference for the reference cell.

    h: (K, M) complex downlink channels (linear amplitude).
    d2d: (K, K) complex; d2d[k, i] is the channel from user i to user k
         (independently sampled per ordered pair; diagonal unused, zero).
    interference_phase1, interference_phase2: (K,) watts, noise included.
    group_index: (K,) group id of each user.
    """

    h: np.ndarray
    d2d: np.ndarray
    interference_phase1: np.ndarray
    interference_phase2: np.ndarray
    group_index: np.ndarray

    @property
    def num_users(self) -> int:
        return self.h.shape[0]

    def digest(self) -> str:
        md = hashlib.sha256()
        for arr in (self.h, self.d2d, self.interference_phase1,
                    self.interference_phase2, self.group_index):
            md.update(np.ascontiguousarray(arr).tobytes())
        return md.hexdigest()


def _cgauss(rng: np.random.Generator, *shape) -> np.ndarray:
    """Standard circularly-symmetric complex Gaussian, unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def sample_channels(topo: Topology, cfg: SystemConfig, rng: np.random.Generator) -> ChannelSet:
    """Sample downlink and D2D channels for the reference cell.

    Interference terms are filled by `sample_interference`; use
    `sample_realization` for a complete ChannelSet.
    """
    pos = topo.reference_users()
    K, M = pos.shape[0], cfg.num_antennas
    group_index = np.concatenate([
        np.full(kn, n, dtype=np.int64) for n, kn in enumerate(cfg.group_sizes)
    ])

    d_bs_km = np.linalg.norm(pos - topo.bs_positions[0], axis=1) / 1000.0
    eta = _amp_gain(macro_path_gain_db(d_bs_km))
    h = eta[:, None] * _cgauss(rng, K, M)

    delta = cfg.rician_factor
    los = math.sqrt(delta / (delta + 1.0))
    nlos = math.sqrt(1.0 / (delta + 1.0))
    d2d = np.zeros((K, K), dtype=complex)
    for k in range(K):
        for i in range(K):
            if i == k:
                continue
            d_km = np.linalg.norm(pos[k] - pos[i]) / 1000.0
            if group_index[k] == group_index[i]:
                eta_d = _amp_gain(d2d_path_gain_db(d_km))
                # LOS component fixed to unit value, zero phase
                d2d[k, i] = eta_d * (los + nlos * _cgauss(rng))
            else:
                eta_d = _amp_gain(macro_path_gain_db(d_km))
                d2d[k, i] = eta_d * _cgauss(rng)

    return ChannelSet(
        h=h,
        d2d=d2d,
        interference_phase1=np.full(K, cfg.noise_power_w),
        interference_phase2=np.full(K, cfg.noise_power_w),
        group_index=group_index,
    )


def sample_interference(
    topo: Topology,
    cfg: SystemConfig,
    rng: np.random.Generator,
    neighbor_cells=range(1, NUM_CELLS),
) -> tuple[np.ndarray, np.ndarray]:
    """Per-user inter-cell interference power (watts, noise included).

    Phase I: each neighbor BS transmits N isotropic random beams over a
    macro-path-loss Rayleigh channel to every reference user, spending
    `neighbor_bs_load` of its budget (a multicast precoder rarely needs
    the full budget). Phase II: each neighbor cell activates
    `neighbor_relays_per_group` uniformly chosen relays per group, each
    transmitting at full user power.
    """
    pos = topo.reference_users()
    K, M, N = pos.shape[0], cfg.num_antennas, cfg.num_groups
    noise = cfg.noise_power_w
    i1 = np.full(K, noise)
    i2 = np.full(K, noise)

    for c in neighbor_cells:
        beams = _cgauss(rng, N, M)
        beams /= np.linalg.norm(beams, axis=1, keepdims=True)
        beams *= math.sqrt(cfg.neighbor_bs_load * cfg.bs_power_w / N)
        d_km = np.linalg.norm(pos - topo.bs_positions[c], axis=1) / 1000.0
        eta = _amp_gain(macro_path_gain_db(d_km))
        g = eta[:, None] * _cgauss(rng, K, M)
        i1 += np.sum(np.abs(g @ beams.T) ** 2, axis=1)

    for c in neighbor_cells:
        for n in range(cfg.num_groups):
            n_relays = min(cfg.neighbor_relays_per_group, cfg.group_sizes[n])
            relays = rng.choice(cfg.group_sizes[n], size=n_relays,
                                replace=False)
            for leader in relays:
                lp = topo.user_positions[c][n][leader]
                d_km = np.linalg.norm(pos - lp, axis=1) / 1000.0
                eta = _amp_gain(macro_path_gain_db(d_km))
                fade = _cgauss(rng, K)
                i2 += cfg.user_power_w * np.abs(eta * fade) ** 2

    return i1, i2


def sample_realization(cfg: SystemConfig, rng: np.random.Generator,
                       neighbor_cells=range(1, NUM_CELLS)) -> tuple[Topology, ChannelSet]:
    """One complete realization: topology, channels, and interference."""
    topo = generate_topology(cfg, rng)
    ch = sample_channels(topo, cfg, rng)
    i1, i2 = sample_interference(topo, cfg, rng, neighbor_cells)
    ch = ChannelSet(
        h=ch.h, d2d=ch.d2d,
        interference_phase1=i1, interference_phase2=i2,
        group_index=ch.group_index,
    )
    return topo, ch


def dump_realization(path: str | Path, topo: Topology, ch: ChannelSet) -> None:
    """Write a realization to a versioned .npz artifact for regression checks."""
    users = np.concatenate([np.concatenate(cell, axis=0) for cell in topo.user_positions])
    counts = np.array([[len(g) for g in cell] for cell in topo.user_positions])
    np.savez(
        path,
        format_version=np.int64(DUMP_FORMAT_VERSION),
        bs_positions=topo.bs_positions,
        group_centers=topo.group_centers,
        user_positions_flat=users,
        user_counts=counts,
        h=ch.h,
        d2d=ch.d2d,
        interference_phase1=ch.interference_phase1,
        interference_phase2=ch.interference_phase2,
        group_index=ch.group_index,
    )


def load_realization(path: str | Path) -> tuple[Topology, ChannelSet]:
    data = np.load(path)
    version = int(data["format_version"])
    if version != DUMP_FORMAT_VERSION:
        raise ValueError(f"unsupported realization format version {version}")
    counts = data["user_counts"]
    flat = data["user_positions_flat"]
    users, at = [], 0
    for cell_counts in counts:
        cell = []
        for kn in cell_counts:
            cell.append(flat[at:at + kn])
            at += kn
        users.append(cell)
    topo = Topology(bs_positions=data["bs_positions"],
                    group_centers=data["group_centers"],
                    user_positions=users)
    ch = ChannelSet(
        h=data["h"], d2d=data["d2d"],
        interference_phase1=data["interference_phase1"],
        interference_phase2=data["interference_phase2"],
        group_index=data["group_index"],
    )
    return topo, ch
