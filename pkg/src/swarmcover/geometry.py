"""Planar polygon geometry for regions and coverage footprints.

Boolean areas (intersection, union, clipped union) are computed from the
boundary of the result set: every polygon edge is split at its crossings
with the other polygons, each piece is classified against the other
polygons, and the pieces that bound the result are integrated with the
shoelace sum. This handles concave inputs, disconnected results and holes
without building output rings.
"""
from __future__ import annotations

import json
import math
import re
from functools import lru_cache
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

EPS = 1e-9
_DUP_EPS = 1e-12


class GeometryError(ValueError):
    """Invalid polygon or geometric argument."""


class RegionFileError(ValueError):
    """A region file could not be parsed into a valid polygon."""

    def __init__(self, path, context: str, message: str):
        self.path = str(path)
        self.context = context
        self.message = message
        super().__init__(f"{self.path}: {context}: {message}")


def _next(v: np.ndarray) -> np.ndarray:
    """Vertex array shifted so row k holds vertex k + 1."""
    return np.concatenate((v[1:], v[:1]))


def _shoelace(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x[:-1], y[1:]) - np.dot(x[1:], y[:-1]) + x[-1] * y[0] - x[0] * y[-1])


def _self_intersections(v: np.ndarray, eps: float = EPS) -> list[tuple[int, int]]:
    """Pairs of non-adjacent edges that touch or cross."""
    n = len(v)
    p = v
    r = _next(v) - v
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    if len(i) == 0:
        return []
    pi, ri, pj, rj = p[i], r[i], p[j], r[j]
    denom = _cross(ri, rj)
    qp = pj - pi
    scale = np.linalg.norm(ri, axis=1) * np.linalg.norm(rj, axis=1)
    parallel = np.abs(denom) <= 1e-14 * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        t = _cross(qp, rj) / denom
        u = _cross(qp, ri) / denom
    tol_t = eps / np.linalg.norm(ri, axis=1)
    tol_u = eps / np.linalg.norm(rj, axis=1)
    hit = (~parallel) & (t >= -tol_t) & (t <= 1 + tol_t) & (u >= -tol_u) & (u <= 1 + tol_u)
    # collinear overlap
    collinear = parallel & (np.abs(_cross(qp, ri)) <= eps * np.linalg.norm(ri, axis=1))
    if collinear.any():
        rr = np.einsum("ij,ij->i", ri, ri)
        t0 = np.einsum("ij,ij->i", pj - pi, ri) / rr
        t1 = np.einsum("ij,ij->i", pj + rj - pi, ri) / rr
        lo, hi = np.minimum(t0, t1), np.maximum(t0, t1)
        hit |= collinear & (hi >= -tol_t) & (lo <= 1 + tol_t)
    return [(int(a), int(b)) for a, b in zip(i[hit], j[hit])]


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True, eq=False)
class Polygon:
    """Simple polygon with counterclockwise vertices (meters).

    Clockwise input is reversed at construction. Consecutive duplicate
    vertices and a repeated closing vertex are rejected by ``__post_init__``;
    use :meth:`from_ring` for lenient input.
    """

    vertices: np.ndarray
    check_simple: bool = field(default=True, repr=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 2:
            raise GeometryError(f"vertices must have shape (n, 2), got {v.shape}")
        if len(v) < 3:
            raise GeometryError("degenerate ring: fewer than 3 vertices")
        if not np.all(np.isfinite(v)):
            raise GeometryError("non-finite vertex coordinate")
        step = np.linalg.norm(_next(v) - v, axis=1)
        if np.any(step <= _DUP_EPS):
            k = int(np.argmax(step <= _DUP_EPS))
            raise GeometryError(f"degenerate ring: vertices {k} and {(k + 1) % len(v)} coincide")
        if self.check_simple:
            bad = _self_intersections(v)
            if bad:
                a, b = bad[0]
                raise GeometryError(f"self-intersecting ring: edges {a} and {b} intersect")
        area = _shoelace(v)
        if abs(area) <= _DUP_EPS:
            raise GeometryError("degenerate ring: zero area")
        if area < 0:
            v = v[::-1].copy()
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_ring(cls, points) -> "Polygon":
        """Build from a ring that may repeat its first vertex at the end."""
        v = np.asarray(points, dtype=np.float64)
        if len(v) >= 2 and np.linalg.norm(v[0] - v[-1]) <= _DUP_EPS:
            v = v[:-1]
        return cls(v)

    @classmethod
    def _trusted(cls, v: np.ndarray) -> "Polygon":
        """Skip validation for rings that are CCW and simple by construction."""
        p = object.__new__(cls)
        v = np.asarray(v, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(p, "vertices", v)
        object.__setattr__(p, "check_simple", False)
        return p

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, Polygon):
            return NotImplemented
        return self.vertices.shape == other.vertices.shape and bool(
            np.array_equal(self.vertices, other.vertices)
        )

    __hash__ = None

    @property
    def area(self) -> float:
        return _shoelace(self.vertices)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    @property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = _next(v)
        c = _cross(v, w)
        a = c.sum() / 2.0
        return np.array([((v[:, 0] + w[:, 0]) * c).sum(), ((v[:, 1] + w[:, 1]) * c).sum()]) / (6.0 * a)

    def translated(self, offset) -> "Polygon":
        return Polygon(self.vertices + np.asarray(offset, dtype=np.float64), check_simple=False)

    def scaled(self, factor: float) -> "Polygon":
        return Polygon(self.vertices * float(factor), check_simple=False)


@dataclass(frozen=True)
class CoveragePolygon:
    """Regular n-gon footprint inscribed in a circle around an agent."""

    center: tuple[float, float]
    radius: float
    n_edges: int
    polygon: Polygon


@dataclass(frozen=True)
class PolygonRegion:
    polygon: Polygon
    name: str = ""

    @property
    def area(self) -> float:
        return self.polygon.area

    def as_polygon(self) -> Polygon:
        return self.polygon

    @property
    def bounds(self):
        return self.polygon.bounds


@dataclass(frozen=True)
class DiskRegion:
    """Analytic disk with the quadratic region function x^2 + y^2 - r^2."""

    center: tuple[float, float]
    radius: float
    name: str = ""
    n_edges: int = 256

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError("disk radius must be positive")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    def as_polygon(self) -> Polygon:
        # polygonal stand-in for boolean operations
        return make_coverage_polygon(self.center, self.radius, self.n_edges).polygon

    @property
    def bounds(self):
        cx, cy = self.center
        r = self.radius
        return cx - r, cy - r, cx + r, cy + r


Region = Union[PolygonRegion, DiskRegion]


def region_polygon(reg) -> Polygon:
    if isinstance(reg, Polygon):
        return reg
    return reg.as_polygon()


def polygon_area(p: Polygon) -> float:
    return p.area


def _segment_distances(q: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from points q (k, 2) to segments a->b (m, 2); shape (k, m)."""
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    w = q[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("kmj,mj->km", w, d) / dd, 0.0, 1.0)
    closest = a[None, :, :] + t[..., None] * d[None, :, :]
    return np.linalg.norm(q[:, None, :] - closest, axis=2)


def _crossing_parity(q: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-point, per-edge ray crossing indicator (k, m) for a ray toward +x."""
    qx, qy = q[:, 0:1], q[:, 1:2]
    ay, by = a[None, :, 1], b[None, :, 1]
    straddle = (ay > qy) != (by > qy)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = a[None, :, 0] + (qy - ay) * (b[None, :, 0] - a[None, :, 0]) / (by - ay)
    return straddle & (qx < xint)


def points_in_polygon(points, p: Polygon, eps: float = EPS) -> np.ndarray:
    """Vectorized closed-set membership for an array of points."""
    q = np.atleast_2d(np.asarray(points, dtype=np.float64))
    a = p.vertices
    b = _next(a)
    out = np.empty(len(q), dtype=bool)
    # chunk to bound the (k, m) temporaries
    chunk = max(1, 2_000_000 // len(a))
    for s in range(0, len(q), chunk):
        qq = q[s : s + chunk]
        inside = _crossing_parity(qq, a, b).sum(axis=1) % 2 == 1
        on = _segment_distances(qq, a, b).min(axis=1) <= eps
        out[s : s + chunk] = inside | on
    return out


def point_in_polygon(q, p: Polygon) -> bool:
    """True when q lies inside p or on its boundary."""
    return bool(points_in_polygon(np.asarray(q, dtype=np.float64)[None, :], p)[0])


def boundary_distance(q, p: Polygon) -> float:
    q = np.asarray(q, dtype=np.float64)[None, :]
    a = p.vertices
    return float(_segment_distances(q, a, _next(a)).min())


def distance_to_polygon(q, p: Polygon) -> float:
    """Zero inside or on the boundary, Euclidean distance to p otherwise."""
    if point_in_polygon(q, p):
        return 0.0
    return boundary_distance(q, p)


def distances_to_polygon(points, p: Polygon) -> np.ndarray:
    q = np.atleast_2d(np.asarray(points, dtype=np.float64))
    a = p.vertices
    d = _segment_distances(q, a, _next(a)).min(axis=1)
    return np.where(points_in_polygon(q, p), 0.0, d)


@lru_cache(maxsize=16)
def _unit_ngon(n_edges: int) -> np.ndarray:
    ang = 2.0 * np.pi * np.arange(n_edges) / n_edges
    v = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    v.setflags(write=False)
    return v


def regular_polygon_vertices(center, radius: float, n_edges: int) -> np.ndarray:
    """Vertex k at angle 2*pi*k/n_edges, all at distance ``radius``."""
    return np.asarray(center, dtype=np.float64) + radius * _unit_ngon(n_edges)


def make_coverage_polygon(center, radius: float, n_edges: int = 30) -> CoveragePolygon:
    if not radius > 0:
        raise GeometryError(f"coverage radius must be positive, got {radius}")
    if int(n_edges) != n_edges or n_edges < 3:
        raise GeometryError(f"n_edges must be an integer >= 3, got {n_edges}")
    n_edges = int(n_edges)
    v = regular_polygon_vertices(center, radius, n_edges)
    c = (float(center[0]), float(center[1]))
    return CoveragePolygon(c, float(radius), n_edges, Polygon._trusted(v))


# --- boolean areas -------------------------------------------------------

Predicate = Callable[[np.ndarray], np.ndarray]


def _scale_eps(polys: Sequence[Polygon]) -> float:
    span = max(float(np.abs(p.vertices).max()) for p in polys)
    return EPS * max(1.0, span)


@dataclass
class _Pieces:
    """Edge pieces of a polygon arrangement with side memberships.

    ``left[k, j]`` / ``right[k, j]`` tell whether the points just left/right
    of piece k belong to polygon j. Coordinates are shifted by ``ref``.
    """

    A: np.ndarray
    B: np.ndarray
    owner: np.ndarray
    on_same: np.ndarray
    left: np.ndarray
    right: np.ndarray
    ref: np.ndarray


def _classify(polys: Sequence[Polygon]) -> _Pieces:
    ref = np.mean([p.vertices.mean(axis=0) for p in polys], axis=0)
    verts = [p.vertices - ref for p in polys]
    eps = _scale_eps(polys)
    counts = np.array([len(v) for v in verts])
    offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
    P = np.concatenate(verts)
    Q = np.concatenate([_next(v) for v in verts])
    owner = np.repeat(np.arange(len(verts)), counts)
    r = Q - P
    rlen = np.linalg.norm(r, axis=1)
    m = len(P)

    # split parameters along each edge e from every edge f of another polygon
    other = owner[:, None] != owner[None, :]
    lo_e, hi_e = np.minimum(P, Q), np.maximum(P, Q)
    near = (
        other
        & (lo_e[:, None, 0] <= hi_e[None, :, 0] + eps)
        & (lo_e[None, :, 0] <= hi_e[:, None, 0] + eps)
        & (lo_e[:, None, 1] <= hi_e[None, :, 1] + eps)
        & (lo_e[None, :, 1] <= hi_e[:, None, 1] + eps)
    )
    ei, fi = np.nonzero(near)
    splits_e = [np.arange(m), np.arange(m)]
    splits_t = [np.zeros(m), np.ones(m)]
    if len(ei):
        re_, rf_ = r[ei], r[fi]
        qp = P[fi] - P[ei]
        denom = _cross(re_, rf_)
        parallel = np.abs(denom) <= 1e-14 * rlen[ei] * rlen[fi]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = _cross(qp, rf_) / denom
            u = _cross(qp, re_) / denom
        tol_t = eps / rlen[ei]
        tol_u = eps / rlen[fi]
        ok = (~parallel) & (u >= -tol_u) & (u <= 1 + tol_u) & (t > tol_t) & (t < 1 - tol_t)
        splits_e.append(ei[ok])
        splits_t.append(t[ok])
        coll = parallel & (np.abs(_cross(qp, re_)) <= eps * rlen[ei])
        ce, cf = ei[coll], fi[coll]
        if len(ce):
            rr = rlen[ce] ** 2
            for pt in (P[cf], Q[cf]):
                tc = np.einsum("ij,ij->i", pt - P[ce], r[ce]) / rr
                okc = (tc > eps / rlen[ce]) & (tc < 1 - eps / rlen[ce])
                splits_e.append(ce[okc])
                splits_t.append(tc[okc])
    else:
        ce = cf = np.zeros(0, dtype=np.int64)
    se = np.concatenate(splits_e)
    st = np.concatenate(splits_t)
    order = np.lexsort((st, se))
    se, st = se[order], st[order]
    same = se[1:] == se[:-1]
    e = se[:-1][same]
    t0, t1 = st[:-1][same], st[1:][same]
    A = P[e] + t0[:, None] * r[e]
    B = P[e] + t1[:, None] * r[e]
    seg_len = np.linalg.norm(B - A, axis=1)
    keep = seg_len > eps
    A, B, e = A[keep], B[keep], e[keep]
    if len(A) == 0:
        z = np.zeros((0, len(verts)), dtype=bool)
        return _Pieces(A, B, owner[e], z, z, z, ref)
    seg_owner = owner[e]
    mid = 0.5 * (A + B)
    k = len(mid)
    npoly = len(verts)

    # a piece can only lie on another boundary along a collinear edge pair
    on_same = np.zeros((k, npoly), dtype=bool)
    on_opp = np.zeros((k, npoly), dtype=bool)
    on_same[np.arange(k), seg_owner] = True
    if len(ce):
        starts = np.searchsorted(e, ce, side="left")
        stops = np.searchsorted(e, ce, side="right")
        idx = np.concatenate([np.arange(a, b) for a, b in zip(starts, stops)])
        pair = np.repeat(np.arange(len(ce)), stops - starts)
        if len(idx):
            f = cf[pair]
            w = mid[idx] - P[f]
            tf = np.einsum("ij,ij->i", w, r[f]) / rlen[f] ** 2
            off = np.abs(_cross(w, r[f])) / rlen[f]
            hit = (tf > 0) & (tf < 1) & (off <= eps)
            sgn = np.einsum("ij,ij->i", r[ce[pair]], r[f])
            on_same[idx[hit & (sgn > 0)], owner[f[hit & (sgn > 0)]]] = True
            on_opp[idx[hit & (sgn < 0)], owner[f[hit & (sgn < 0)]]] = True
    parity = np.add.reduceat(_crossing_parity(mid, P, Q).astype(np.int64), offsets, axis=1) % 2 == 1
    left = np.where(on_same, True, np.where(on_opp, False, parity))
    right = np.where(on_same, False, np.where(on_opp, True, parity))
    return _Pieces(A, B, seg_owner, on_same, left, right, ref)


def _select(pc: _Pieces, predicate: Predicate, involved=None) -> np.ndarray:
    """Mask of pieces bounding predicate(set), restricted to ``involved`` polygons."""
    if involved is None:
        on_same, left, right, owner = pc.on_same, pc.left, pc.right, pc.owner
        rows = slice(None)
    else:
        involved = np.asarray(involved)
        col = np.full(pc.left.shape[1], -1)
        col[involved] = np.arange(len(involved))
        rows = col[pc.owner] >= 0
        on_same = pc.on_same[rows][:, involved]
        left = pc.left[rows][:, involved]
        right = pc.right[rows][:, involved]
        owner = col[pc.owner[rows]]
    # coincident same-direction pieces are counted once, by the lowest index
    first_same = np.argmax(on_same, axis=1)
    sel = predicate(left) & ~predicate(right) & (first_same == owner)
    mask = np.zeros(len(pc.A), dtype=bool)
    mask[np.flatnonzero(rows) if involved is not None else slice(None)] = sel
    return mask


def _pieces_area(pc: _Pieces, mask: np.ndarray) -> float:
    if not mask.any():
        return 0.0
    return 0.5 * float(_cross(pc.A[mask], pc.B[mask]).sum())


def boolean_boundary(polys: Sequence[Polygon], predicate: Predicate) -> np.ndarray:
    """Boundary pieces of a boolean combination of polygons.

    ``predicate`` maps a (k, m) membership matrix to a (k,) membership of the
    result set. It must be monotone (union/intersection style). Returns a
    (k, 4) array of directed segments ``x0, y0, x1, y1`` with the result set
    on their left; shoelace-summing them gives the result area.
    """
    polys = list(polys)
    if not polys:
        return np.zeros((0, 4))
    pc = _classify(polys)
    sel = _select(pc, predicate)
    return np.concatenate([pc.A[sel] + pc.ref, pc.B[sel] + pc.ref], axis=1)


def _boundary_area(segments: np.ndarray) -> float:
    if len(segments) == 0:
        return 0.0
    # shift for conditioning; closed boundary makes the sum translation-free
    ref = segments[:, :2].mean(axis=0)
    a = segments[:, :2] - ref
    b = segments[:, 2:] - ref
    return 0.5 * float(_cross(a, b).sum())


def _bbox_disjoint(a: Polygon, b: Polygon) -> bool:
    ax0, ay0, ax1, ay1 = a.bounds
    bx0, by0, bx1, by1 = b.bounds
    return ax1 < bx0 or bx1 < ax0 or ay1 < by0 or by1 < ay0


def _all(x):
    return x.all(axis=1)


def _any(x):
    return x.any(axis=1)


def _first_and_any_rest(x):
    return x[:, 0] & x[:, 1:].any(axis=1)


def intersection_area(a: Polygon, b: Polygon) -> float:
    if _bbox_disjoint(a, b):
        return 0.0
    return max(0.0, _boundary_area(boolean_boundary([a, b], _all)))


def union_boundary(polys: Sequence[Polygon]) -> np.ndarray:
    return boolean_boundary(polys, _any)


def union_area(polys: Sequence[Polygon], method: str = "exact") -> float:
    """Area of the union of ``polys``, overlaps counted once.

    ``method="raster"`` is a grid-sampling fallback for pathological inputs;
    each cell is 1e-3 of the bounding-box diagonal.
    """
    polys = list(polys)
    if not polys:
        return 0.0
    if method == "raster":
        return _raster_union_area(polys)
    if method != "exact":
        raise ValueError(f"unknown union method {method!r}")
    if len(polys) == 1:
        return polys[0].area
    return max(0.0, _boundary_area(union_boundary(polys)))


def coverage_areas(polys: Sequence[Polygon], clip: Polygon) -> tuple[np.ndarray, float]:
    """Each polygon's overlap with ``clip`` and the clipped union, in one pass."""
    polys = list(polys)
    inter = np.zeros(len(polys))
    active = [k for k, p in enumerate(polys) if not _bbox_disjoint(p, clip)]
    if not active:
        return inter, 0.0
    pc = _classify([clip, *[polys[k] for k in active]])
    for col, k in enumerate(active, start=1):
        inter[k] = max(0.0, _pieces_area(pc, _select(pc, _all, [0, col])))
    union = max(0.0, _pieces_area(pc, _select(pc, _first_and_any_rest)))
    return inter, union


def clipped_union_area(polys: Sequence[Polygon], clip: Polygon) -> float:
    """Area of (union of polys) intersected with ``clip``."""
    polys = [p for p in polys if not _bbox_disjoint(p, clip)]
    if not polys:
        return 0.0
    return max(0.0, _boundary_area(boolean_boundary([clip, *polys], _first_and_any_rest)))


def _raster_union_area(polys: Sequence[Polygon]) -> float:
    lo = np.min([p.vertices.min(axis=0) for p in polys], axis=0)
    hi = np.max([p.vertices.max(axis=0) for p in polys], axis=0)
    cell = 1e-3 * float(np.linalg.norm(hi - lo))
    xs = np.arange(lo[0] + cell / 2, hi[0], cell)
    ys = np.arange(lo[1] + cell / 2, hi[1], cell)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    hit = np.zeros(len(pts), dtype=bool)
    for p in polys:
        x0, y0, x1, y1 = p.bounds
        cand = ~hit & (pts[:, 0] >= x0) & (pts[:, 0] <= x1) & (pts[:, 1] >= y0) & (pts[:, 1] <= y1)
        idx = np.nonzero(cand)[0]
        if len(idx):
            hit[idx] = points_in_polygon(pts[idx], p)
    return float(hit.sum()) * cell * cell


# --- region function ------------------------------------------------------


def signed_region_value(q, reg) -> float:
    """Negative inside, zero on the boundary, increasing outside."""
    q = np.asarray(q, dtype=np.float64)
    if isinstance(reg, DiskRegion):
        dx = q[0] - reg.center[0]
        dy = q[1] - reg.center[1]
        return float(dx * dx + dy * dy - reg.radius**2)
    poly = region_polygon(reg)
    d = boundary_distance(q, poly)
    if d <= EPS:
        return 0.0
    return -d if point_in_polygon(q, poly) else d


def signed_region_values(points, reg) -> np.ndarray:
    q = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if isinstance(reg, DiskRegion):
        c = np.asarray(reg.center)
        return ((q - c) ** 2).sum(axis=1) - reg.radius**2
    poly = region_polygon(reg)
    a = poly.vertices
    d = _segment_distances(q, a, _next(a)).min(axis=1)
    inside = points_in_polygon(q, poly)
    return np.where(d <= EPS, 0.0, np.where(inside, -d, d))


# --- region files ---------------------------------------------------------

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_WKT = re.compile(r"\s*POLYGON\s*\(\s*\((?P<ring>[^()]*)\)\s*(?P<rest>(?:,\s*\([^()]*\)\s*)*)\)\s*", re.I)


def _parse_wkt(text: str, path) -> tuple[list, dict]:
    m = _WKT.fullmatch(text)
    if not m:
        line = text[: len(text) - len(text.lstrip())].count("\n") + 1
        raise RegionFileError(path, f"line {line}", "expected a single WKT POLYGON with nothing after it")
    if m.group("rest").strip():
        raise RegionFileError(path, "POLYGON", "interior rings (holes) are not supported")
    ring = []
    for k, chunk in enumerate(m.group("ring").split(",")):
        parts = chunk.split()
        if len(parts) != 2 or not all(re.fullmatch(_NUM, s) for s in parts):
            raise RegionFileError(path, f"vertex {k}", f"expected 'x y', got {chunk.strip()!r}")
        ring.append([float(parts[0]), float(parts[1])])
    return ring, {"name": Path(path).stem, "crs": "local"}


def _parse_json(text: str, path) -> tuple[list, dict]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RegionFileError(path, f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    if not isinstance(doc, dict):
        raise RegionFileError(path, "document", "expected a JSON object")
    allowed = {"name", "crs", "ring", "area_m2"}
    for key in doc:
        if key not in allowed:
            raise RegionFileError(path, key, "unknown field")
    if "ring" not in doc:
        raise RegionFileError(path, "ring", "missing field")
    name = doc.get("name", Path(path).stem)
    if not isinstance(name, str):
        raise RegionFileError(path, "name", "expected a string")
    crs = doc.get("crs", "local")
    if crs not in ("utm", "local"):
        raise RegionFileError(path, "crs", f"expected 'utm' or 'local', got {crs!r}")
    ring = doc["ring"]
    if not isinstance(ring, list):
        raise RegionFileError(path, "ring", "expected a list of [x, y] pairs")
    for k, pt in enumerate(ring):
        ok = (
            isinstance(pt, list)
            and len(pt) == 2
            and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in pt)
        )
        if not ok:
            raise RegionFileError(path, f"ring[{k}]", f"expected [x, y] numbers, got {pt!r}")
        if not all(math.isfinite(c) for c in pt):
            raise RegionFileError(path, f"ring[{k}]", "non-finite coordinate")
    meta = {"name": name, "crs": crs}
    if "area_m2" in doc:
        a = doc["area_m2"]
        if not isinstance(a, (int, float)) or isinstance(a, bool) or not a > 0:
            raise RegionFileError(path, "area_m2", "expected a positive number")
        meta["area_m2"] = float(a)
    return [[float(x), float(y)] for x, y in ring], meta


@dataclass(frozen=True)
class RegionFile:
    region: PolygonRegion
    crs: str
    stated_area: float | None
    raw_area: float
    offset: tuple[float, float] = (0.0, 0.0)
    scale: float = 1.0


def read_region_file(path, target_width: float | None = None, translate: bool = False) -> RegionFile:
    """Parse a JSON or WKT region file and optionally normalize it.

    Normalization translates the bounding-box minimum to the origin and, if
    ``target_width`` is given, scales uniformly so the box width equals it.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("{") or path.suffix.lower() == ".json":
        ring, meta = _parse_json(text, path)
    else:
        ring, meta = _parse_wkt(text, path)
    v = np.asarray(ring, dtype=np.float64).reshape(-1, 2)
    if len(v) >= 2 and np.linalg.norm(v[0] - v[-1]) <= _DUP_EPS:
        v = v[:-1]
    if len(v) < 3:
        raise RegionFileError(path, "ring", f"degenerate ring: {len(v)} distinct vertices")
    step = np.linalg.norm(_next(v) - v, axis=1)
    if np.any(step <= _DUP_EPS):
        k = int(np.argmax(step <= _DUP_EPS))
        raise RegionFileError(path, f"ring[{k}]", "degenerate ring: repeated consecutive vertex")
    # intersections are tested in a local frame to keep UTM magnitudes well conditioned
    local = v - v.min(axis=0)
    bad = _self_intersections(local, eps=EPS * max(1.0, float(np.abs(local).max())))
    if bad:
        a, b = bad[0]
        raise RegionFileError(path, f"ring edges {a} and {b}", "self-intersecting ring")
    try:
        poly = Polygon(v, check_simple=False)
    except GeometryError as exc:
        raise RegionFileError(path, "ring", str(exc)) from None
    raw_area = poly.area
    offset = (0.0, 0.0)
    scale = 1.0
    if translate or target_width is not None:
        x0, y0, x1, _ = poly.bounds
        offset = (-x0, -y0)
        verts = poly.vertices - np.array([x0, y0])
        if target_width is not None:
            if not target_width > 0:
                raise GeometryError("target_width must be positive")
            scale = float(target_width) / (x1 - x0)
            verts = verts * scale
        poly = Polygon(verts, check_simple=False)
    region = PolygonRegion(poly, name=meta["name"])
    return RegionFile(region, meta["crs"], meta.get("area_m2"), raw_area, offset, scale)


def load_region(path, target_width: float | None = None, translate: bool = False) -> PolygonRegion:
    return read_region_file(path, target_width=target_width, translate=translate).region
