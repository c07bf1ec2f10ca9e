"""Swarming (SW) and coverage-range (CR) reward schemes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .environment import WorldState


@dataclass(frozen=True)
class SwRewardSpec:
    R1_in: float = 150.0
    R2_out: float = 200.0
    alpha: float = 150.0
    beta: float = 200.0
    prop_range: tuple[float, float] = (0.85, 1.2)
    coll_range: tuple[float, float] = (0.0, 0.56)
    aggregate: str = "sum"

    def __post_init__(self):
        for name in ("R1_in", "R2_out", "alpha", "beta"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        (a, b), (c, d) = self.prop_range, self.coll_range
        if not (a < b and c < d):
            raise ValueError("ranges need lower < upper")
        if not (b < c or d < a):
            raise ValueError("prop_range and coll_range overlap")
        if self.aggregate not in ("sum", "mean"):
            raise ValueError("aggregate must be 'sum' or 'mean'")


@dataclass(frozen=True)
class CrRewardSpec:
    R1_full: float = 60.0
    R2_partial: float = 30.0
    R3_out: float = 0.0
    c1: float = 1.0
    c2: float = 5.0
    clip_overall_to_region: bool = True

    def __post_init__(self):
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("weights c1, c2 must be >= 0")


# --- SW -----------------------------------------------------------------


def sw_region_reward(pos, reg, spec: SwRewardSpec) -> float:
    d = geo.signed_region_value(pos, reg)
    if d < 0:
        return spec.R1_in
    return -spec.R2_out - d


def _pair_distances(positions: np.ndarray) -> np.ndarray:
    i, j = np.triu_indices(len(positions), k=1)
    return np.linalg.norm(positions[i] - positions[j], axis=1)


def sw_inter_agent_reward(positions, spec: SwRewardSpec) -> float:
    d = _pair_distances(np.asarray(positions, dtype=np.float64))
    (a, b), (c, e) = spec.prop_range, spec.coll_range
    n_prop = np.count_nonzero((d >= a) & (d <= b))
    n_coll = np.count_nonzero((d >= c) & (d <= e))
    return float(spec.alpha * n_prop - spec.beta * n_coll)


def sw_shared_reward(state: WorldState, reg, spec: SwRewardSpec) -> np.ndarray:
    """Team total returned to every agent."""
    pos = state.positions
    d = geo.signed_region_values(pos, reg)
    region_terms = np.where(d < 0, spec.R1_in, -spec.R2_out - d)
    total = float(region_terms.sum()) + sw_inter_agent_reward(pos, spec)
    if spec.aggregate == "mean":
        total /= len(pos)
    return np.full(len(pos), total)


# --- CR -----------------------------------------------------------------


def coverage_polygons(state: WorldState, radius: float = 0.5, n_edges: int = 30):
    return [geo.make_coverage_polygon(p, radius, n_edges) for p in state.positions]


def cr_cover_reward(agent: geo.CoveragePolygon, reg, spec: CrRewardSpec) -> float:
    """Individual coverage term for one agent footprint."""
    cov = agent.polygon
    poly = geo.region_polygon(reg)
    cov_area = cov.area
    inter = geo.intersection_area(cov, poly)
    if inter > 0.0:
        fully = abs(inter - cov_area) <= 1e-9 and bool(geo.points_in_polygon(cov.vertices, poly).all())
        if fully:
            return spec.R1_full + cov_area
        return spec.R2_partial + inter
    probes = np.vstack([cov.vertices, np.asarray(agent.center)[None, :]])
    dist = float(geo.distances_to_polygon(probes, poly).min())
    return -spec.R3_out - dist


def overall_area_coverage(agents, reg, spec: CrRewardSpec) -> float:
    polys = [a.polygon for a in agents]
    if not polys:
        return 0.0
    if spec.clip_overall_to_region:
        return geo.clipped_union_area(polys, geo.region_polygon(reg))
    return geo.union_area(polys)


def cr_overall_reward(state: WorldState, reg, spec: CrRewardSpec,
                      radius: float = 0.5, n_edges: int = 30) -> np.ndarray:
    agents = coverage_polygons(state, radius, n_edges)
    collective = overall_area_coverage(agents, reg, spec)
    individual = np.array([cr_cover_reward(a, reg, spec) for a in agents])
    return spec.c1 * individual + spec.c2 * collective


# --- dispatch -------------------------------------------------------------


def step_rewards(scheme: str, state: WorldState, reg, spec, radius: float = 0.5,
                 n_edges: int = 30) -> tuple[np.ndarray, float]:
    """Per-agent reward vector and the region area covered by the swarm.

    Batched equivalent of :func:`sw_shared_reward` / :func:`cr_overall_reward`
    used inside rollouts.
    """
    agents = coverage_polygons(state, radius, n_edges)
    polys = [a.polygon for a in agents]
    region = geo.region_polygon(reg)
    inter, covered = geo.coverage_areas(polys, region)
    if scheme == "sw":
        return sw_shared_reward(state, reg, spec), covered
    if scheme != "cr":
        raise ValueError(f"unknown reward scheme {scheme!r}")
    cov_area = polys[0].area
    individual = np.empty(len(polys))
    partial = inter > 0.0
    full = np.zeros(len(polys), dtype=bool)
    if partial.any():
        cand = np.flatnonzero(partial & (np.abs(inter - cov_area) <= 1e-9))
        if len(cand):
            inside = geo.points_in_polygon(np.concatenate([polys[k].vertices for k in cand]), region)
            full[cand] = inside.reshape(len(cand), -1).all(axis=1)
    individual[full] = spec.R1_full + cov_area
    part = partial & ~full
    individual[part] = spec.R2_partial + inter[part]
    out = ~partial
    if out.any():
        idx = np.flatnonzero(out)
        probes = np.concatenate([np.vstack([polys[k].vertices, state.positions[k]]) for k in idx])
        d = geo.distances_to_polygon(probes, region).reshape(len(idx), -1).min(axis=1)
        individual[out] = -spec.R3_out - d
    collective = covered if spec.clip_overall_to_region else geo.union_area(polys)
    return spec.c1 * individual + spec.c2 * collective, covered
