#!/usr/bin/env python3
"""Desk-scale CR vs SW training: 4 agents on a 2 m square, 1500 episodes.

Writes per-seed metrics CSVs, a smoothed reward/coverage SVG per scheme and
summary.json with the trend numbers checked by the acceptance suite.

    python3 scripts/desk_trend.py --out runs/desk --seeds 0 1 2
"""
import argparse
import json
import logging
from pathlib import Path

import numpy as np

from swarmcover import harness, svg, trends

log = logging.getLogger("desk_trend")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=Path, default=Path("runs/desk"))
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--episodes", type=int, default=trends.DESK_EPISODES)
    ap.add_argument("--update-every", type=int, default=trends.DESK_UPDATE_EVERY)
    ap.add_argument("--schemes", nargs="+", choices=("cr", "sw"), default=["cr", "sw"])
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    args.out.mkdir(parents=True, exist_ok=True)

    summary = {"episodes": args.episodes, "update_every": args.update_every, "seeds": args.seeds}
    for scheme in args.schemes:
        runs = []
        for seed in args.seeds:
            log.info("%s seed %d", scheme, seed)
            run = trends.desk_run(scheme, seed, args.episodes, args.update_every)
            harness.write_metrics(run.result.rows, args.out / f"{scheme}_seed{seed}.csv")
            runs.append(run)
        summary[scheme] = {
            "first100_coverage": [r.first_coverage for r in runs],
            "final100_coverage": [r.final_coverage for r in runs],
            "untrained_baseline": [r.baseline for r in runs],
            "first_reach_episode": [trends.first_reach_index(r.reward) for r in runs],
        }
        smooth = max(1, args.episodes // 50)
        reward = {f"seed {r.seed}": r.reward for r in runs}
        cover = {f"seed {r.seed}": r.coverage for r in runs}
        (args.out / f"{scheme}_reward.svg").write_text(
            svg.reward_curve(reward, title=f"{scheme.upper()} average agent reward", smooth=smooth))
        (args.out / f"{scheme}_coverage.svg").write_text(
            svg.reward_curve(cover, title=f"{scheme.upper()} coverage fraction", smooth=smooth))
        log.info("%s coverage %.3f -> %.3f", scheme, np.mean(summary[scheme]["first100_coverage"]),
                 np.mean(summary[scheme]["final100_coverage"]))

    (args.out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
