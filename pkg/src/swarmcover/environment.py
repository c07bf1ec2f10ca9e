"""Point-agent particle world: spawning, kinematics and observations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Region


@dataclass(frozen=True)
class Box:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError(f"degenerate box {self}")


def corner_spawn_box(region, size: float = 0.5, offset: float = 0.5) -> Box:
    """Square of side ``size`` just outside the region's lower-left bbox corner."""
    x0, y0, _, _ = region.bounds
    return Box(x0 - offset, y0 - offset, x0 - offset + size, y0 - offset + size)


@dataclass(frozen=True)
class EnvConfig:
    region: Region
    n_agents: int = 9
    agent_radius: float = 0.08
    coverage_radius: float = 0.5
    coverage_edges: int = 30
    spawn_box: Box | None = None
    dt: float = 0.1
    damping: float = 0.25
    u_max: float = 1.0
    v_max: float = 1.0
    steps_per_episode: int = 25
    kinematics_mode: str = "velocity"
    observe_velocity: bool = False

    def __post_init__(self):
        if self.n_agents < 1:
            raise ValueError("n_agents must be >= 1")
        if not self.agent_radius > 0:
            raise ValueError("agent_radius must be positive")
        if not self.coverage_radius > 0:
            raise ValueError("coverage_radius must be positive")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not 0 <= self.damping < 1:
            raise ValueError("damping must lie in [0, 1)")
        if not self.v_max > 0:
            raise ValueError("v_max must be positive")
        if not self.u_max > 0:
            raise ValueError("u_max must be positive")
        if self.steps_per_episode < 1:
            raise ValueError("steps_per_episode must be >= 1")
        if self.kinematics_mode not in ("velocity", "displacement"):
            raise ValueError(f"unknown kinematics_mode {self.kinematics_mode!r}")
        if self.spawn_box is None:
            object.__setattr__(self, "spawn_box", corner_spawn_box(self.region))

    @property
    def obs_dim(self) -> int:
        return 4 if self.observe_velocity else 2

    @property
    def act_dim(self) -> int:
        return 2


@dataclass(frozen=True)
class WorldState:
    positions: np.ndarray
    velocities: np.ndarray
    step_index: int = 0

    def __post_init__(self):
        for name in ("positions", "velocities"):
            a = np.array(getattr(self, name), dtype=np.float64)
            if a.ndim != 2 or a.shape[1] != 2:
                raise ValueError(f"{name} must have shape (n, 2)")
            if not np.all(np.isfinite(a)):
                raise FloatingPointError(f"non-finite {name}")
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.positions.shape != self.velocities.shape:
            raise ValueError("positions and velocities differ in shape")

    @property
    def n_agents(self) -> int:
        return len(self.positions)


def reset(cfg: EnvConfig, seed) -> WorldState:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    b = cfg.spawn_box
    pos = np.column_stack([
        rng.uniform(b.x0, b.x1, cfg.n_agents),
        rng.uniform(b.y0, b.y1, cfg.n_agents),
    ])
    return WorldState(pos, np.zeros_like(pos), 0)


def _clip_norm(v: np.ndarray, limit: float) -> np.ndarray:
    n = np.linalg.norm(v, axis=1, keepdims=True)
    factor = np.where(n > limit, limit / np.maximum(n, 1e-300), 1.0)
    return v * factor


def step(state: WorldState, act, cfg: EnvConfig) -> WorldState:
    a = np.asarray(act, dtype=np.float64)
    if a.shape != state.positions.shape:
        raise ValueError(f"action shape {a.shape} does not match {state.positions.shape}")
    a = np.clip(a, -1.0, 1.0)
    p, v = state.positions, state.velocities
    if cfg.kinematics_mode == "velocity":
        v_new = (1.0 - cfg.damping) * v + cfg.u_max * a * cfg.dt
        v_new = _clip_norm(v_new, cfg.v_max)
        p_new = p + v_new * cfg.dt
    else:
        disp = _clip_norm(cfg.u_max * a, cfg.v_max * cfg.dt)
        p_new = p + disp
        v_new = disp / cfg.dt
    return WorldState(p_new, v_new, state.step_index + 1)


def observe(state: WorldState, i: int, cfg: EnvConfig | None = None) -> np.ndarray:
    if not 0 <= i < state.n_agents:
        raise IndexError(f"agent index {i} out of range for {state.n_agents} agents")
    if cfg is not None and cfg.observe_velocity:
        return np.concatenate([state.positions[i], state.velocities[i]])
    return state.positions[i].copy()


def observe_all(state: WorldState, cfg: EnvConfig | None = None) -> np.ndarray:
    """Per-agent observations stacked as (n_agents, obs_dim)."""
    if cfg is not None and cfg.observe_velocity:
        return np.concatenate([state.positions, state.velocities], axis=1)
    return state.positions.copy()


def joint_observation(state: WorldState, cfg: EnvConfig | None = None) -> np.ndarray:
    return observe_all(state, cfg).ravel()
