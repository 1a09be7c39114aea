"""Command-line front end: campaigns, message-size sweeps, solver
self-validation, and realization dumps."""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import conic, harness, radio
from .conic import ConicProgram, SocConstraint, solve
from .core import (SystemConfig, default_config, load_config, min_sinr_target,
                   validate_config)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=str, default=None,
                   help="config file (key = value); defaults to built-in setup")
    p.add_argument("--scheme", action="append", default=None,
                   help="scheme to run (proposed, b1..b6); repeatable; default: all")
    p.add_argument("--trials", type=int, default=300)
    p.add_argument("--seed", type=int, default=None,
                   help="override config seed")
    p.add_argument("--out-dir", type=str, default="results")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--phase2-strategy", choices=["full", "residual"], default="full")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="leadercast",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)

    run = sub.add_parser("run", help="Monte Carlo campaign at a fixed message size")
    _add_common(run)
    run.add_argument("--d-bits", type=int, default=None,
                     help="uniform per-user message size in bits")

    sweep = sub.add_parser("sweep", help="campaign per message size; emits plot CSV")
    _add_common(sweep)
    sweep.add_argument("--d-bits", type=str, required=True,
                       help="comma-separated message sizes, e.g. 12,14,...,28")

    val = sub.add_parser("validate", help="solver and model self-tests")
    val.add_argument("--tol", type=float, default=1e-7,
                     help="solver tolerance used by the self-tests")

    dump = sub.add_parser("dump-realization", help="write one channel realization to .npz")
    dump.add_argument("--config", type=str, default=None)
    dump.add_argument("--seed", type=int, default=None)
    dump.add_argument("--trial", type=int, default=0)
    dump.add_argument("--out", type=str, required=True)
    return ap


def _load(args) -> SystemConfig | None:
    if args.config is not None:
        if not Path(args.config).is_file():
            print(f"error: config file not found: {args.config}", file=sys.stderr)
            return None
        cfg = load_config(args.config)
    else:
        cfg = default_config()
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_seed(args.seed)
    if getattr(args, "d_bits", None) is not None and isinstance(args.d_bits, int):
        cfg = cfg.with_uniform_bits(args.d_bits)
    violations = validate_config(cfg)
    if violations:
        print("invalid config:", file=sys.stderr)
        for v in violations:
            print(f"  - {v}", file=sys.stderr)
        return None
    return cfg


def _schemes(args) -> list[harness.SchemeId]:
    if not args.scheme:
        return list(harness.SchemeId)
    return [harness.SchemeId.parse(s) for s in args.scheme]


def _print_summary(report: harness.ReliabilityReport) -> None:
    print(f"{'scheme':<26}{'P(all 48)':>12}{'95% CI':>22}{'mean ok':>10}"
          f"{'led groups':>12}{'solver fail':>12}")
    for s, st in report.stats.items():
        ci = f"[{st.ci_low:.4f}, {st.ci_high:.4f}]"
        print(f"{s.value:<26}{st.probability:>12.4f}{ci:>22}"
              f"{st.mean_success:>10.2f}{st.mean_groups_with_leader:>12.2f}"
              f"{st.sca_failures:>12d}")


def cmd_run(args) -> int:
    if args.trials < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return 2
    cfg = _load(args)
    if cfg is None:
        return 2
    schemes = _schemes(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = harness.run_campaign(cfg, schemes, args.trials, args.workers,
                                  args.phase2_strategy)
    harness.write_trials_csv(out / "trials.csv", report, cfg.num_groups)
    harness.write_summary_json(out / "summary.json", report)
    _print_summary(report)
    print(f"wrote {out / 'trials.csv'} and {out / 'summary.json'}")
    return 0


def cmd_sweep(args) -> int:
    if args.trials < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return 2
    try:
        d_values = [int(tok) for tok in args.d_bits.split(",") if tok.strip()]
    except ValueError:
        print(f"error: bad --d-bits list: {args.d_bits}", file=sys.stderr)
        return 2
    if not d_values:
        print("error: --d-bits list is empty", file=sys.stderr)
        return 2
    cfg = _load(args)
    if cfg is None:
        return 2
    schemes = _schemes(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = harness.sweep_message_size(cfg, schemes, d_values, args.trials,
                                         args.workers, args.phase2_strategy)
    for d, report in results:
        harness.write_summary_json(out / f"summary_D{d}.json", report)
        print(f"--- D = {d} bits ---")
        _print_summary(report)
    harness.write_sweep_csv(out / "sweep.csv", results)
    print(f"wrote {out / 'sweep.csv'}")
    return 0


def cmd_dump(args) -> int:
    cfg = default_config() if args.config is None else load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, args.trial, 0]))
    topo, ch = radio.sample_realization(cfg, rng)
    radio.dump_realization(args.out, topo, ch)
    print(f"wrote {args.out} (digest {ch.digest()[:16]})")
    return 0


# ------------------------------------------------------- validate command

def _check(name: str, ok: bool, detail: str = "") -> bool:
    print(f"  [{'ok' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
    return ok


def cmd_validate(args) -> int:
    ok = True
    print("target cross-checks")
    # whole-cell multicast over 75 symbols: 48 users x 12 bits, then x 22 bits
    t1 = min_sinr_target(48 * 12, 0.75e-3 * 1e5)
    ok &= _check("cell-wide multicast target (12-bit messages) 23.10 dB",
                 abs(t1.db - 23.10) < 5e-3, f"{t1.db:.4f} dB")
    t2 = min_sinr_target(48 * 22, 0.75e-3 * 1e5)
    ok &= _check("cell-wide multicast target (22-bit messages) about 42 dB",
                 42.0 <= t2.db <= 42.8, f"{t2.db:.4f} dB")

    print("conic solver self-tests")
    # min -x s.t. x >= 0, ||x - 2|| <= 1  -> x = 3
    F = conic.sp.csc_matrix(np.array([[0.0], [1.0]]))
    p = ConicProgram(num_vars=1, c=np.array([-1.0]),
                     A_eq=conic.sp.csc_matrix((0, 1)), b_eq=np.zeros(0),
                     nonneg_idx=np.array([0]),
                     socs=[SocConstraint(F, np.array([1.0, -2.0]), "ball")])
    sol = solve(p, tol=args.tol)
    ok &= _check("1-D ball maximum", sol.status == "optimal"
                 and abs(sol.x[0] - 3.0) < 1e-5, f"x={sol.x[0]:.8f}")

    # min ||w|| s.t. a^T w = 1 -> w = a/||a||^2; modeled as min r, ||w|| <= r
    rng = np.random.default_rng(7)
    a = rng.standard_normal(4)
    tri = np.zeros((5, 5))
    tri[0, 4] = 1.0
    tri[1:, :4] = np.eye(4)
    prog = ConicProgram(
        num_vars=5, c=np.array([0, 0, 0, 0, 1.0]),
        A_eq=conic.sp.csc_matrix(np.hstack([a, [0.0]]).reshape(1, -1)),
        b_eq=np.array([1.0]),
        nonneg_idx=np.array([], dtype=int),
        socs=[SocConstraint(conic.sp.csc_matrix(tri), np.zeros(5), "norm")],
    )
    sol = solve(prog, tol=args.tol)
    w_ref = a / (a @ a)
    ok &= _check("min-norm hyperplane projection",
                 sol.status == "optimal" and np.allclose(sol.x[:4], w_ref, atol=1e-5),
                 f"max err {np.max(np.abs(sol.x[:4] - w_ref)):.2e}")

    if sol.kkt_residuals:
        worst = max(sol.kkt_residuals.values())
        ok &= _check("KKT residuals within tolerance", worst < max(args.tol * 100, 1e-6),
                     f"worst {worst:.2e}")

    print("optimizer invariants (synthetic instance)")
    cfg = default_config(seed=123)
    from . import beamform, protocol
    rng = np.random.default_rng(np.random.SeedSequence([123, 0, 0]))
    _, ch = radio.sample_realization(cfg, rng)
    beams, t, trace = beamform.run_sca(ch, protocol.phase1_group_targets(cfg), cfg,
                                       rng=np.random.default_rng(1))
    obj = np.array(trace.objectives)
    mono = bool(np.all(np.diff(obj) <= 1e-6 * np.maximum(1.0, np.abs(obj[:-1]))))
    ok &= _check("surrogate descent is monotone", (not trace.failed) and mono,
                 f"{trace.iterations} iterations")
    ok &= _check("beams respect the power budget",
                 beams.total_power <= cfg.bs_power_w * (1 + 1e-6),
                 f"{beams.total_power:.3f} W of {cfg.bs_power_w:.3f} W")
    return 0 if ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return {"run": cmd_run, "sweep": cmd_sweep, "validate": cmd_validate,
            "dump-realization": cmd_dump}[args.subcommand](args)


if __name__ == "__main__":
    sys.exit(main())
