"""Monte Carlo orchestration: per-trial scheme pipelines and aggregation.

Every scheme sees the identical channel realization for a given
(seed, trial index), so schemes are compared on matched channels. Trials
are independent work items; aggregation is in trial order so reports are
identical regardless of worker count.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import beamform, protocol
from .core import SystemConfig
from .radio import sample_realization

__all__ = ["SchemeId", "TrialOutcome", "SchemeStats", "ReliabilityReport",
           "run_trial", "run_campaign", "sweep_message_size",
           "write_trials_csv", "write_summary_json", "write_sweep_csv"]

SUMMARY_SCHEMA_VERSION = 1


class SchemeId(str, Enum):
    PROPOSED = "proposed"
    B1_NO_LEADER_SELECTION = "b1_no_leader_selection"
    B2_OCCUPY_COW = "b2_occupy_cow"
    B3_OCCUPY_COW_LEADERS = "b3_occupy_cow_leaders"
    B4_BROADCAST = "b4_broadcast"
    B5_TDMA = "b5_tdma"
    B6_ONE_PHASE_MULTICAST = "b6_one_phase_multicast"

    @classmethod
    def parse(cls, name: str) -> "SchemeId":
        aliases = {
            "proposed": cls.PROPOSED,
            "b1": cls.B1_NO_LEADER_SELECTION,
            "b2": cls.B2_OCCUPY_COW,
            "b3": cls.B3_OCCUPY_COW_LEADERS,
            "b4": cls.B4_BROADCAST,
            "b5": cls.B5_TDMA,
            "b6": cls.B6_ONE_PHASE_MULTICAST,
        }
        key = name.strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown scheme {name!r}; use proposed or b1..b6") from None


@dataclass(frozen=True)
class TrialOutcome:
    trial_index: int
    scheme: SchemeId
    success_count: int
    urllc: bool
    groups_with_leader: int
    leader_counts: tuple[int, ...]
    sca_iterations: int
    sca_failed: bool
    realization_digest: str


@dataclass(frozen=True)
class SchemeStats:
    scheme: SchemeId
    trials: int
    successes: int
    probability: float
    ci_low: float
    ci_high: float
    mean_success: float
    mean_groups_with_leader: float
    sca_failures: int


@dataclass(frozen=True)
class ReliabilityReport:
    config_seed: int
    n_trials: int
    stats: dict  # SchemeId -> SchemeStats
    trials: tuple  # TrialOutcome, trial-major then scheme order


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _trial_rng(cfg: SystemConfig, trial_index: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, trial_index, stream]))


def run_trial(cfg: SystemConfig, scheme: SchemeId, trial_index: int,
              phase2_strategy: str = "full") -> TrialOutcome:
    """Run one scheme on the trial's realization. Deterministic in
    (cfg.seed, trial_index, scheme)."""
    return _run_trial_schemes(cfg, [scheme], trial_index, phase2_strategy)[0]


def _run_trial_schemes(cfg: SystemConfig, schemes, trial_index: int,
                       phase2_strategy: str = "full") -> list[TrialOutcome]:
    """All requested schemes on the same realization (one sampling pass)."""
    _, ch = sample_realization(cfg, _trial_rng(cfg, trial_index, 0))
    digest = ch.digest()
    out = []
    for scheme in schemes:
        scheme = SchemeId(scheme)
        sca_rng = np.random.default_rng(
            np.random.SeedSequence([cfg.seed, trial_index, 1, _scheme_ordinal(scheme)])
        )
        iters, failed = 0, False
        if scheme in (SchemeId.PROPOSED, SchemeId.B1_NO_LEADER_SELECTION):
            mode = "proposed" if scheme is SchemeId.PROPOSED else "l1_only"
            beams, _, trace = beamform.run_sca(
                ch, protocol.phase1_group_targets(cfg), cfg, mode=mode, rng=sca_rng)
            iters, failed = trace.iterations, trace.failed
            po = protocol.evaluate_two_phase(ch, beams, cfg, "coherent", phase2_strategy)
        elif scheme in (SchemeId.B2_OCCUPY_COW, SchemeId.B3_OCCUPY_COW_LEADERS):
            with_pen = scheme is SchemeId.B3_OCCUPY_COW_LEADERS
            beams, _, trace = beamform.run_sca_single_beam(
                ch, protocol.occupy_cow_phase1_target(cfg), cfg,
                with_leader_penalty=with_pen, rng=sca_rng)
            iters, failed = trace.iterations, trace.failed
            po = protocol.evaluate_two_phase(ch, beams, cfg, "selection")
        elif scheme is SchemeId.B4_BROADCAST:
            ch1 = protocol.one_phase_channel(ch, cfg)
            beams, _, status = beamform.solve_broadcast(
                ch1, protocol.broadcast_targets(cfg), cfg)
            failed = status != "optimal"
            tar = np.array([t.linear_value for t in protocol.broadcast_targets(cfg)])
            po = protocol.evaluate_one_phase(ch1, beams, cfg, tar)
        elif scheme is SchemeId.B5_TDMA:
            po = protocol.evaluate_tdma(protocol.one_phase_channel(ch, cfg), cfg)
        elif scheme is SchemeId.B6_ONE_PHASE_MULTICAST:
            ch1 = protocol.one_phase_channel(ch, cfg)
            targets = protocol.one_phase_multicast_targets(cfg)
            beams, _, trace = beamform.run_sca(ch1, targets, cfg, mode="l1_only", rng=sca_rng)
            iters, failed = trace.iterations, trace.failed
            tar = np.array([targets[g].linear_value for g in ch.group_index])
            po = protocol.evaluate_one_phase(ch1, beams, cfg, tar)
        else:
            raise ValueError(f"unhandled scheme {scheme}")

        if failed:
            # solver failure counts as an outage rather than being resampled
            out.append(TrialOutcome(trial_index, scheme, 0, False, 0,
                                    (0,) * cfg.num_groups, iters, True, digest))
        else:
            out.append(TrialOutcome(
                trial_index, scheme,
                po.success_count, po.urllc, po.groups_with_leader(),
                tuple(len(s) for s in po.leader_sets),
                iters, False, digest,
            ))
    return out


def _scheme_ordinal(scheme: SchemeId) -> int:
    return list(SchemeId).index(scheme)


def _worker(args):
    cfg, schemes, trial, strategy = args
    return _run_trial_schemes(cfg, schemes, trial, strategy)


def run_campaign(cfg: SystemConfig, schemes, n_trials: int, workers: int = 1,
                 phase2_strategy: str = "full") -> ReliabilityReport:
    """Monte Carlo campaign over matched realizations.

    Results are independent of worker count: trials are reduced in
    index order.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    schemes = [SchemeId(s) for s in schemes]
    jobs = [(cfg, schemes, t, phase2_strategy) for t in range(n_trials)]
    if workers <= 1:
        results = [_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker, jobs, chunksize=8))

    all_trials = tuple(o for batch in results for o in batch)
    stats = {}
    for scheme in schemes:
        rows = [o for o in all_trials if o.scheme is scheme]
        successes = sum(o.urllc for o in rows)
        lo, hi = wilson_interval(successes, n_trials)
        stats[scheme] = SchemeStats(
            scheme=scheme,
            trials=n_trials,
            successes=successes,
            probability=successes / n_trials,
            ci_low=lo,
            ci_high=hi,
            mean_success=sum(o.success_count for o in rows) / n_trials,
            mean_groups_with_leader=sum(o.groups_with_leader for o in rows) / n_trials,
            sca_failures=sum(o.sca_failed for o in rows),
        )
    return ReliabilityReport(cfg.seed, n_trials, stats, all_trials)


def sweep_message_size(cfg: SystemConfig, schemes, d_values, n_trials: int,
                       workers: int = 1, phase2_strategy: str = "full"):
    """One campaign per message size D, reusing matched realizations.

    Channel sampling does not consume the message size, so the same
    (seed, trial) pair sees the same realization at every D.
    """
    d_values = list(d_values)
    if not d_values:
        raise ValueError("d_values must be nonempty")
    return [
        (d, run_campaign(cfg.with_uniform_bits(d), schemes, n_trials,
                         workers, phase2_strategy))
        for d in d_values
    ]


# ------------------------------------------------------------------- I/O

def write_trials_csv(path: str | Path, report: ReliabilityReport,
                     num_groups: int) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["trial", "scheme", "success_count", "urllc"]
                   + [f"leaders_g{n}" for n in range(num_groups)])
        for o in report.trials:
            w.writerow([o.trial_index, o.scheme.value, o.success_count,
                        int(o.urllc), *o.leader_counts])


def summary_dict(report: ReliabilityReport) -> dict:
    return {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "seed": report.config_seed,
        "trials": report.n_trials,
        "schemes": {
            s.value: {
                "trials": st.trials,
                "successes": st.successes,
                "probability": st.probability,
                "ci_low": st.ci_low,
                "ci_high": st.ci_high,
                "mean_success": st.mean_success,
                "mean_groups_with_leader": st.mean_groups_with_leader,
                "sca_failures": st.sca_failures,
            }
            for s, st in report.stats.items()
        },
    }


def write_summary_json(path: str | Path, report: ReliabilityReport) -> None:
    Path(path).write_text(json.dumps(summary_dict(report), indent=2, sort_keys=True) + "\n")


def write_sweep_csv(path: str | Path, sweep_results) -> None:
    """Plot-data CSV: one row per (D, scheme)."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["D", "scheme", "probability", "ci_low", "ci_high"])
        for d, report in sweep_results:
            for s, st in report.stats.items():
                w.writerow([d, s.value, f"{st.probability:.10g}",
                            f"{st.ci_low:.10g}", f"{st.ci_high:.10g}"])
