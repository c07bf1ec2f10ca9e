"""Desk-scale training setup and learning-curve summaries."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import environment as env
from . import learner
from .rewards import CrRewardSpec, SwRewardSpec
from .scenarios import rectangle

DESK_EPISODES = 1500
DESK_UPDATE_EVERY = 5


def desk_env(n_agents: int = 4, side: float = 2.0, coverage_radius: float = 0.5) -> env.EnvConfig:
    return env.EnvConfig(region=rectangle(side, side, f"square{side:g}"), n_agents=n_agents,
                         coverage_radius=coverage_radius)


def desk_train_config(scheme: str, episodes: int = DESK_EPISODES,
                      update_every: int = DESK_UPDATE_EVERY) -> learner.TrainConfig:
    mode = "shared" if scheme == "sw" else "per_agent"
    return learner.TrainConfig(episodes=episodes, update_every=update_every, reward_mode=mode)


def default_spec(scheme: str):
    return SwRewardSpec() if scheme == "sw" else CrRewardSpec()


def per_episode(rows, column: str) -> np.ndarray:
    eps = max(r.episode for r in rows) + 1
    out = np.zeros(eps)
    cnt = np.zeros(eps)
    for r in rows:
        out[r.episode] += getattr(r, column)
        cnt[r.episode] += 1
    return out / cnt


def trailing_mean(x, window: int) -> np.ndarray:
    """Mean of the last ``window`` values up to each index (shorter at the start)."""
    x = np.asarray(x, dtype=np.float64)
    c = np.concatenate([[0.0], np.cumsum(x)])
    hi = np.arange(1, len(x) + 1)
    lo = np.maximum(0, hi - window)
    return (c[hi] - c[lo]) / (hi - lo)


def first_reach_index(rewards, final_window: int = 100, smooth: int = 50, slack: float = 0.1) -> int:
    """First episode whose smoothed reward is within ``slack`` of the final-window mean.

    "Within 10%" is measured from below as ``final - slack * |final|`` so the
    threshold stays meaningful for negative rewards.
    """
    r = np.asarray(rewards, dtype=np.float64)
    final = float(r[-final_window:].mean())
    target = final - slack * abs(final)
    hit = np.flatnonzero(trailing_mean(r, smooth) >= target)
    return int(hit[0]) if len(hit) else len(r)


@dataclass
class DeskRun:
    scheme: str
    seed: int
    coverage: np.ndarray
    reward: np.ndarray
    baseline: float
    result: learner.TrainResult

    @property
    def first_coverage(self) -> float:
        return float(self.coverage[:100].mean())

    @property
    def final_coverage(self) -> float:
        return float(self.coverage[-100:].mean())


def desk_run(scheme: str, seed: int, episodes: int = DESK_EPISODES, update_every: int = DESK_UPDATE_EVERY,
             baseline_episodes: int = 20) -> DeskRun:
    """Train at desk scale and measure the untrained-policy coverage baseline."""
    env_cfg = desk_env()
    cfg = desk_train_config(scheme, episodes, update_every)
    spec = default_spec(scheme)
    untrained = learner.make_agents(env_cfg.n_agents, env_cfg.obs_dim, env_cfg.act_dim, cfg, seed)
    base = learner.evaluate(untrained, env_cfg, scheme, spec, baseline_episodes, seed, cfg.reward_mode)
    res = learner.train_run(env_cfg, scheme, spec, cfg, seed)
    return DeskRun(scheme, seed, per_episode(res.rows, "coverage_fraction"),
                   per_episode(res.rows, "mean_reward"), base.final_coverage_fraction, res)
