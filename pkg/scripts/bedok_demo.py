#!/usr/bin/env python3
"""Load the bundled reservoir outline, report its areas and render a snapshot.

    python3 scripts/bedok_demo.py --out runs/bedok --episodes 50
"""
import argparse
import json
from pathlib import Path

from swarmcover import geometry as geo
from swarmcover.cli import main as cli
from swarmcover.scenarios import BEDOK_WIDTH, bedok_path


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=Path, default=Path("runs/bedok"))
    ap.add_argument("--episodes", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    raw = geo.read_region_file(bedok_path())
    norm = geo.read_region_file(bedok_path(), target_width=BEDOK_WIDTH, translate=True)
    print(json.dumps({
        "vertices": len(raw.region.polygon),
        "stated_area_m2": raw.stated_area,
        "ring_area_m2": raw.raw_area,
        "normalized_width": BEDOK_WIDTH,
        "normalized_area": norm.region.area,
        "scale": norm.scale,
    }, indent=2))

    common = ["--scenario", "bedok", "--scheme", "cr", "--seed", str(args.seed), "--out", str(args.out)]
    if cli(["train", "--episodes", str(args.episodes), *common]) != 0:
        raise SystemExit(1)
    cli(["render", *common])
    cli(["eval", *common])


if __name__ == "__main__":
    main()
