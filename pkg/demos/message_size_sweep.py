"""Reliability vs message size, and sensitivity to user-BS distance.

Sweeps the per-user message size D for the proposed scheme and the
strongest one-shot baseline (per-user broadcast beamforming), then
repeats the proposed-scheme sweep with groups placed farther from the
base station. Writes plot-ready CSVs and prints a compact table.

Usage: python3 demos/message_size_sweep.py [--trials 100] [--out-dir demo_results]
"""

import argparse
from pathlib import Path

from leadercast import harness
from leadercast.core import default_config
from leadercast.harness import SchemeId

D_VALUES = (12, 14, 16, 18, 20, 22, 24, 26, 28)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", type=str, default="demo_results")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    schemes = [SchemeId.PROPOSED, SchemeId.B4_BROADCAST]
    near_cfg = default_config(seed=args.seed)
    near = harness.sweep_message_size(near_cfg, schemes, D_VALUES, args.trials)
    harness.write_sweep_csv(out / "sweep_near.csv", near)

    far_cfg = default_config(seed=args.seed,
                             donut_inner_m=350.0, donut_outer_m=450.0)
    far = harness.sweep_message_size(far_cfg, [SchemeId.PROPOSED],
                                     D_VALUES, args.trials)
    harness.write_sweep_csv(out / "sweep_far.csv", far)

    print(f"{'D bits':>7}{'proposed':>10}{'broadcast':>11}{'proposed@far':>14}")
    for (d, rn), (_, rf) in zip(near, far):
        p = rn.stats[SchemeId.PROPOSED].probability
        b = rn.stats[SchemeId.B4_BROADCAST].probability
        f = rf.stats[SchemeId.PROPOSED].probability
        print(f"{d:>7}{p:>10.3f}{b:>11.3f}{f:>14.3f}")

    print(f"\nwrote {out / 'sweep_near.csv'} and {out / 'sweep_far.csv'}")
    print("Larger messages raise the multicast SINR target exponentially;")
    print("moving groups 100 m farther out costs ~4 dB of path gain and")
    print("shrinks the outage-free message range accordingly.")


if __name__ == "__main__":
    main()
