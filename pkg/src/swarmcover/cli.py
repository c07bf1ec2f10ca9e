"""Command line: ``swarmcover train|eval|render|gradcheck``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import harness
from .checkpoint import CheckpointError
from .config import ConfigError, parse_config
from .scenarios import SCENARIOS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swarmcover", description=__doc__)
    p.add_argument("command", choices=("train", "eval", "render", "gradcheck"))
    p.add_argument("--config", type=Path, default=None, help="run configuration JSON (defaults if omitted)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("runs/default"))
    p.add_argument("--scenario", choices=SCENARIOS, default=None)
    p.add_argument("--scheme", choices=("sw", "cr"), default=None)
    p.add_argument("--reward-mode", choices=("shared", "per_agent"), default=None)
    p.add_argument("--episodes", type=int, default=None, help="override train.episodes")
    p.add_argument("--checkpoint", type=Path, default=None, help="eval/render: checkpoint to load")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def run(command: str, cfg, seed: int, out: Path, checkpoint=None):
    if command == "train":
        return harness.cmd_train(cfg, seed, out)
    if command == "eval":
        return harness.cmd_eval(cfg, seed, out, checkpoint)
    if command == "render":
        return harness.cmd_render(cfg, seed, out, checkpoint)
    if command == "gradcheck":
        return harness.cmd_gradcheck(cfg, seed, out)
    raise ValueError(f"unknown command {command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    overrides = {
        "scenario": args.scenario,
        "scheme": args.scheme,
        "train.reward_mode": args.reward_mode,
        "train.episodes": args.episodes,
    }
    try:
        cfg = parse_config(args.config, overrides)
        result = run(args.command, cfg, args.seed, args.out, args.checkpoint)
    except (ConfigError, CheckpointError, harness.HarnessError, FileNotFoundError) as exc:
        print(f"swarmcover {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.command == "train":
        print(f"wrote {result.metrics}, {result.checkpoint}")
    elif args.command in ("eval", "gradcheck"):
        print(json.dumps(result, indent=2, sort_keys=True))
    else:
        print(f"wrote {result}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
