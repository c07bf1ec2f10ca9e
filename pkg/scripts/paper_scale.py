#!/usr/bin/env python3
"""Full-size runs: 9 agents, 10,000 episodes, both schemes on the 9 m^2 shapes.

Each run goes through the regular ``train`` subcommand, so every output
directory holds metrics.csv, checkpoint.bin, reward_curve.svg and the
resolved config. Expect many hours per run on one core; use --episodes to
shorten.

    python3 scripts/paper_scale.py --out runs/full --scenarios square3 rect1x9
"""
import argparse
import itertools
from pathlib import Path

from swarmcover.cli import main as cli


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=Path, default=Path("runs/full"))
    ap.add_argument("--scenarios", nargs="+", default=["square3", "rect1x9"])
    ap.add_argument("--schemes", nargs="+", choices=("sw", "cr"), default=["sw", "cr"])
    ap.add_argument("--episodes", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for scenario, scheme in itertools.product(args.scenarios, args.schemes):
        out = args.out / f"{scenario}_{scheme}"
        argv = ["train", "--scenario", scenario, "--scheme", scheme, "--episodes", str(args.episodes),
                "--seed", str(args.seed), "--out", str(out), "-v"]
        if cli(argv) != 0:
            raise SystemExit(f"training failed for {scenario}/{scheme}")
        cli(["render", "--scenario", scenario, "--scheme", scheme, "--seed", str(args.seed), "--out", str(out)])


if __name__ == "__main__":
    main()
