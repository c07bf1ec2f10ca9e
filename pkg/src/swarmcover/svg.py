"""Dependency-free SVG output: reward curves and swarm snapshots."""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from . import geometry as geo

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
            "#bcbd22", "#17becf")


def _f(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


def _header(width: float, height: float) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]


def reward_curve(series: dict[str, Sequence[float]], title: str = "Average agent reward",
                 width: int = 720, height: int = 400, smooth: int = 1) -> str:
    """Line chart of one or more per-episode series keyed by label."""
    pad_l, pad_r, pad_t, pad_b = 70, 130, 40, 50
    w, h = width - pad_l - pad_r, height - pad_t - pad_b
    data = {}
    for k, v in series.items():
        y = np.asarray(v, dtype=np.float64)
        if smooth > 1 and len(y) >= smooth:
            y = np.convolve(y, np.ones(smooth) / smooth, mode="valid")
        data[k] = y
    n = max((len(v) for v in data.values()), default=0)
    vals = np.concatenate([v for v in data.values()]) if data else np.zeros(1)
    lo, hi = (float(vals.min()), float(vals.max())) if vals.size else (0.0, 1.0)
    if hi - lo < 1e-12:
        lo, hi = lo - 1.0, hi + 1.0

    def px(i):
        return pad_l + w * (i / max(1, n - 1))

    def py(v):
        return pad_t + h * (1.0 - (v - lo) / (hi - lo))

    out = _header(width, height)
    out.append(f'<text x="{width / 2}" y="22" text-anchor="middle" font-family="sans-serif" '
               f'font-size="15">{escape(title)}</text>')
    out.append(f'<rect class="axes" x="{pad_l}" y="{pad_t}" width="{w}" height="{h}" fill="none" stroke="#333"/>')
    for k in range(5):
        v = lo + (hi - lo) * k / 4
        out.append(f'<text x="{pad_l - 6}" y="{_f(py(v) + 4)}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="11">{v:.4g}</text>')
        i = (n - 1) * k / 4
        out.append(f'<text x="{_f(px(i))}" y="{pad_t + h + 16}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="11">{int(round(i))}</text>')
    out.append(f'<text x="{pad_l + w / 2}" y="{height - 10}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="12">episode</text>')
    for j, (label, y) in enumerate(data.items()):
        color = _PALETTE[j % len(_PALETTE)]
        if len(y):
            pts = " ".join(f"{_f(px(i))},{_f(py(v))}" for i, v in enumerate(y))
            out.append(f'<polyline class="series" fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        ly = pad_t + 14 * j + 10
        out.append(f'<line x1="{pad_l + w + 10}" y1="{ly}" x2="{pad_l + w + 28}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{pad_l + w + 32}" y="{ly + 4}" font-family="sans-serif" font-size="11">'
                   f'{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def snapshot(region, positions, coverage_radius: float = 0.5, n_edges: int = 30,
             agent_radius: float = 0.08, size: int = 600, margin: float = 0.15) -> str:
    """Region outline, agents, coverage polygons and the merged coverage boundary."""
    poly = geo.region_polygon(region)
    pos = np.atleast_2d(np.asarray(positions, dtype=np.float64))
    covs = [geo.make_coverage_polygon(p, coverage_radius, n_edges).polygon for p in pos]
    x0, y0, x1, y1 = region.bounds
    span = max(x1 - x0, y1 - y0)
    x0, y0 = x0 - margin * span, y0 - margin * span
    x1, y1 = x1 + margin * span, y1 + margin * span
    scale = size / max(x1 - x0, y1 - y0)
    width, height = (x1 - x0) * scale, (y1 - y0) * scale

    def tx(p):
        return (p[0] - x0) * scale, height - (p[1] - y0) * scale

    def ring_path(v):
        pts = [tx(p) for p in v]
        return "M " + " L ".join(f"{_f(a)} {_f(b)}" for a, b in pts) + " Z"

    out = _header(width, height)
    out.append(f'<path class="region" d="{ring_path(poly.vertices)}" fill="#e6f2ff" stroke="#004c99" '
               f'stroke-width="2"/>')
    for k, c in enumerate(covs):
        pts = " ".join(f"{_f(a)},{_f(b)}" for a, b in (tx(p) for p in c.vertices))
        out.append(f'<polygon class="coverage" data-agent="{k}" points="{pts}" fill="#ffa500" '
                   f'fill-opacity="0.15" stroke="#cc7a00" stroke-width="1"/>')
    if covs:
        segs = geo.union_boundary(covs)
        d = " ".join(f"M {_f(a)} {_f(b)} L {_f(c)} {_f(e)}"
                     for (a, b), (c, e) in ((tx(s[:2]), tx(s[2:])) for s in segs))
        out.append(f'<path class="union" d="{d}" fill="none" stroke="#b30000" stroke-width="2"/>')
    for k, p in enumerate(pos):
        cx, cy = tx(p)
        out.append(f'<circle class="agent" data-agent="{k}" cx="{_f(cx)}" cy="{_f(cy)}" '
                   f'r="{_f(max(2.0, agent_radius * scale))}" fill="#333"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
