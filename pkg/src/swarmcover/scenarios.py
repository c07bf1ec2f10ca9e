"""Built-in regions: the two 9 m^2 test shapes, a 9 m^2 disk, and Bedok."""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import geometry as geo

BEDOK_FILE = "bedok.json"
BEDOK_WIDTH = 8.0

SCENARIOS = ("square3", "rect1x9", "disk", "bedok")


@dataclass(frozen=True)
class Scenario:
    name: str
    region: geo.Region
    scheme: str = "cr"
    n_agents: int = 9
    episodes: int = 10_000

    def __post_init__(self):
        if self.scheme not in ("sw", "cr"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not self.region.area > 0:
            raise ValueError("scenario region has no area")


def rectangle(width: float, height: float, name: str = "") -> geo.PolygonRegion:
    poly = geo.Polygon([[0.0, 0.0], [width, 0.0], [width, height], [0.0, height]])
    return geo.PolygonRegion(poly, name=name)


def bedok_path() -> Path:
    return Path(resources.files("swarmcover") / "data" / BEDOK_FILE)


def builtin_region(name: str, bedok_width: float | None = BEDOK_WIDTH) -> geo.Region:
    if name == "square3":
        return rectangle(3.0, 3.0, "square3")
    if name == "rect1x9":
        return rectangle(9.0, 1.0, "rect1x9")
    if name == "disk":
        r = 3.0 / math.sqrt(math.pi)
        return geo.DiskRegion((r, r), r, name="disk")
    if name == "bedok":
        return geo.load_region(bedok_path(), target_width=bedok_width, translate=True)
    raise KeyError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")


def builtin_scenario(name: str) -> Scenario:
    return Scenario(name, builtin_region(name))
