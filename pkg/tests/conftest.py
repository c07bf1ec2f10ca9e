import math

import numpy as np
import pytest

from swarmcover import geometry as geo

ACCEPTANCE_LINES: list[str] = []


def square(x0=0.0, y0=0.0, side=1.0):
    return geo.Polygon([[x0, y0], [x0 + side, y0], [x0 + side, y0 + side], [x0, y0 + side]])


def ngon_area(radius, n):
    return 0.5 * n * radius**2 * math.sin(2 * math.pi / n)


def star_polygon(rng, n=None, center=(0.0, 0.0), convex=False, scale=1.0):
    """Random simple polygon, star-shaped about ``center``."""
    n = n or int(rng.integers(5, 14))
    gaps = rng.uniform(0.5, 1.5, n)
    ang = np.cumsum(gaps) / gaps.sum() * 2 * np.pi
    if convex:
        r = np.full(n, scale)
    else:
        r = scale * rng.uniform(0.35, 1.0, n)
    v = np.column_stack([center[0] + r * np.cos(ang), center[1] + r * np.sin(ang)])
    return geo.Polygon(v)


def mc_inside(points, vertices):
    """Even-odd crossing test, kept independent of the library code."""
    x, y = points[:, 0], points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    n = len(vertices)
    for k in range(n):
        x1, y1 = vertices[k]
        x2, y2 = vertices[(k + 1) % n]
        if y1 == y2:
            continue
        cond = (y1 > y) != (y2 > y)
        xs = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= cond & (x < xs)
    return inside


def monte_carlo_area(polys, combine, n=1_000_000, seed=0):
    """Rejection-sampling area estimate and its standard error."""
    rng = np.random.default_rng(seed)
    allv = np.vstack([p.vertices for p in polys])
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    box = float(np.prod(hi - lo))
    pts = rng.uniform(lo, hi, size=(n, 2))
    hits = combine([mc_inside(pts, p.vertices) for p in polys])
    p = hits.mean()
    return box * p, box * math.sqrt(max(p * (1 - p), 1e-12) / n)


@pytest.fixture
def unit_square():
    return square()


def record_acceptance(criterion: str, passed: bool, detail: str = ""):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}" + (f" - {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
