"""MADDPG with shared-reward and per-agent-reward routing.

Critics see the joint observation and joint action; actors see only their
own observation. ``reward_mode="shared"`` is the original cooperative
setting (one team reward copied to every agent); ``"per_agent"`` feeds each
critic its own agent's reward entry, which is how the coverage scheme is
trained.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import environment as env
from . import geometry as geo
from . import neural as nn
from .rewards import step_rewards

log = logging.getLogger(__name__)


class TrainingDiverged(FloatingPointError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    gamma: float = 0.95
    tau: float = 0.01
    batch_size: int = 256
    buffer_capacity: int = 100_000
    update_every: int = 25
    warmup: int = 1000
    noise_start: float = 0.3
    noise_end: float = 0.05
    noise_decay_fraction: float = 0.5
    episodes: int = 10_000
    reward_mode: str = "shared"
    actor_lr: float = 1e-3
    critic_lr: float = 1e-3
    hidden: tuple[int, ...] = (64, 64)

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if not 0 < self.tau <= 1:
            raise ValueError("tau must lie in (0, 1]")
        if self.batch_size < 1 or self.buffer_capacity < 1:
            raise ValueError("batch_size and buffer_capacity must be >= 1")
        if self.update_every < 1:
            raise ValueError("update_every must be >= 1")
        if self.warmup < 0 or self.episodes < 0:
            raise ValueError("warmup and episodes must be >= 0")
        if self.noise_start < 0 or self.noise_end < 0:
            raise ValueError("noise scales must be >= 0")
        if not 0 <= self.noise_decay_fraction <= 1:
            raise ValueError("noise_decay_fraction must lie in [0, 1]")
        if self.reward_mode not in ("shared", "per_agent"):
            raise ValueError(f"unknown reward_mode {self.reward_mode!r}")
        for lr in (self.actor_lr, self.critic_lr):
            if not 0 < lr <= 1:
                raise ValueError("learning rates must lie in (0, 1]")
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))

    def noise_scale(self, episode: int) -> float:
        span = self.noise_decay_fraction * self.episodes
        if span <= 0:
            return self.noise_end
        frac = min(1.0, episode / span)
        return self.noise_start + frac * (self.noise_end - self.noise_start)


# --- replay -------------------------------------------------------------


@dataclass(frozen=True)
class Transition:
    x: np.ndarray
    a: np.ndarray
    r: np.ndarray
    x_next: np.ndarray


@dataclass(frozen=True)
class Batch:
    x: np.ndarray
    a: np.ndarray
    r: np.ndarray
    x_next: np.ndarray

    def __len__(self):
        return len(self.x)


class ReplayBuffer:
    """Fixed-capacity FIFO ring of transitions."""

    def __init__(self, capacity: int, n_agents: int, obs_dim: int = 2, act_dim: int = 2):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.n_agents = n_agents
        self.x = np.zeros((capacity, n_agents * obs_dim))
        self.a = np.zeros((capacity, n_agents * act_dim))
        self.r = np.zeros((capacity, n_agents))
        self.x_next = np.zeros((capacity, n_agents * obs_dim))
        self.cursor = 0
        self.size = 0

    def __len__(self):
        return self.size

    def push(self, t: Transition) -> "ReplayBuffer":
        for name in ("x", "a", "r", "x_next"):
            v = np.asarray(getattr(t, name), dtype=np.float64)
            store = getattr(self, name)
            if v.shape != store.shape[1:]:
                raise ValueError(f"transition field {name} has shape {v.shape}, expected {store.shape[1:]}")
            if not np.all(np.isfinite(v)):
                raise ValueError(f"non-finite transition field {name}")
            store[self.cursor] = v
        self.cursor = (self.cursor + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)
        return self

    def _order(self) -> np.ndarray:
        if self.size < self.capacity:
            return np.arange(self.size)
        return (np.arange(self.capacity) + self.cursor) % self.capacity

    def transitions(self) -> list[Transition]:
        """Stored transitions, oldest first."""
        return [Transition(self.x[k].copy(), self.a[k].copy(), self.r[k].copy(), self.x_next[k].copy())
                for k in self._order()]

    def sample_indices(self, size: int, rng: np.random.Generator) -> np.ndarray:
        if size > self.size:
            raise ValueError(f"cannot sample {size} transitions from a buffer holding {self.size}")
        return rng.integers(0, self.size, size=size)

    def sample(self, size: int, rng: np.random.Generator) -> Batch:
        idx = self.sample_indices(size, rng)
        return Batch(self.x[idx], self.a[idx], self.r[idx], self.x_next[idx])


def buffer_push(buf: ReplayBuffer, t: Transition) -> ReplayBuffer:
    return buf.push(t)


def buffer_sample(buf: ReplayBuffer, size: int, rng: np.random.Generator) -> Batch:
    return buf.sample(size, rng)


# --- networks -------------------------------------------------------------


@dataclass
class AgentNets:
    actor: nn.NetworkParams
    critic: nn.NetworkParams
    target_actor: nn.NetworkParams
    target_critic: nn.NetworkParams
    actor_opt: nn.AdamState
    critic_opt: nn.AdamState


def make_agents(n_agents: int, obs_dim: int, act_dim: int, cfg: TrainConfig, rng) -> list[AgentNets]:
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    a_spec = nn.actor_spec(obs_dim, act_dim, cfg.hidden)
    c_spec = nn.critic_spec(n_agents, obs_dim, act_dim, cfg.hidden)
    agents = []
    for _ in range(n_agents):
        actor = nn.init_params(a_spec, rng)
        critic = nn.init_params(c_spec, rng)
        agents.append(AgentNets(
            actor, critic, actor.copy(), critic.copy(),
            nn.AdamState.for_params(actor, cfg.actor_lr),
            nn.AdamState.for_params(critic, cfg.critic_lr),
        ))
    return agents


def _split_obs(x: np.ndarray, n_agents: int) -> list[np.ndarray]:
    d = x.shape[1] // n_agents
    return [x[:, j * d : (j + 1) * d] for j in range(n_agents)]


def _critic_input(x: np.ndarray, a: np.ndarray) -> np.ndarray:
    return np.concatenate([x, a], axis=1)


def agent_reward(batch: Batch, i: int, mode: str) -> np.ndarray:
    if mode == "per_agent":
        return batch.r[:, i]
    if mode == "shared":
        if not np.all(batch.r == batch.r[:, :1]):
            raise ValueError("shared reward mode expects identical reward entries across agents")
        return batch.r[:, 0]
    raise ValueError(f"unknown reward_mode {mode!r}")


def compute_target(batch: Batch, i: int, nets: Sequence[AgentNets], cfg: TrainConfig) -> np.ndarray:
    """Bootstrapped target r_i + gamma * Q'_i(x', mu'_1(o'_1), ..., mu'_N(o'_N))."""
    n = len(nets)
    obs_next = _split_obs(batch.x_next, n)
    a_next = np.concatenate([nn.predict(nets[j].target_actor, obs_next[j]) for j in range(n)], axis=1)
    q_next = nn.predict(nets[i].target_critic, _critic_input(batch.x_next, a_next))[:, 0]
    return agent_reward(batch, i, cfg.reward_mode) + cfg.gamma * q_next


def critic_update(batch: Batch, i: int, nets: Sequence[AgentNets], cfg: TrainConfig,
                  y: np.ndarray | None = None) -> float:
    """One Adam step on the mean squared TD error; returns the pre-step loss."""
    if y is None:
        y = compute_target(batch, i, nets, cfg)
    agent = nets[i]
    q, cache = nn.forward(agent.critic, _critic_input(batch.x, batch.a))
    err = q[:, 0] - y
    loss = float(np.mean(err**2))
    if not np.isfinite(loss):
        raise TrainingDiverged(f"non-finite critic loss for agent {i}")
    grads, _ = nn.backward(agent.critic, cache, (2.0 / len(y)) * err[:, None])
    agent.critic, agent.critic_opt = nn.adam_step(agent.critic, grads, agent.critic_opt)
    return loss


def actor_gradient(batch: Batch, i: int, nets: Sequence[AgentNets]) -> tuple[nn.NetworkParams, float]:
    """Sampled deterministic policy gradient of mean Q_i w.r.t. actor i."""
    n = len(nets)
    agent = nets[i]
    obs = _split_obs(batch.x, n)
    act_dim = batch.a.shape[1] // n
    a_i, a_cache = nn.forward(agent.actor, obs[i])
    a = batch.a.copy()
    a[:, i * act_dim : (i + 1) * act_dim] = a_i
    q, c_cache = nn.forward(agent.critic, _critic_input(batch.x, a))
    _, dq_din = nn.backward(agent.critic, c_cache, np.full_like(q, 1.0 / len(q)))
    off = batch.x.shape[1] + i * act_dim
    dq_da = dq_din[:, off : off + act_dim]
    grads, _ = nn.backward(agent.actor, a_cache, dq_da)
    return grads, float(np.mean(q))


def actor_update(batch: Batch, i: int, nets: Sequence[AgentNets], cfg: TrainConfig | None = None) -> float:
    """One Adam ascent step on actor i; returns the gradient norm."""
    grads, _ = actor_gradient(batch, i, nets)
    g = grads.flat()
    norm = float(np.linalg.norm(g))
    if not np.isfinite(norm):
        raise TrainingDiverged(f"non-finite actor gradient for agent {i}")
    agent = nets[i]
    agent.actor, agent.actor_opt = nn.adam_step(agent.actor, grads, agent.actor_opt, maximize=True)
    return norm


def soft_update(target: nn.NetworkParams, source: nn.NetworkParams, tau: float) -> nn.NetworkParams:
    if target.spec != source.spec:
        raise ValueError("soft_update between networks of different shape")
    return nn.NetworkParams(
        target.spec,
        [tau * s + (1.0 - tau) * t for t, s in zip(target.weights, source.weights)],
        [tau * s + (1.0 - tau) * t for t, s in zip(target.biases, source.biases)],
    )


def update_tick(buf: ReplayBuffer, nets: Sequence[AgentNets], cfg: TrainConfig,
                rng: np.random.Generator) -> tuple[list[float], list[float]]:
    """Critic and actor step for agents 1..N in order, then target tracking."""
    batch = buf.sample(cfg.batch_size, rng)
    losses, norms = [], []
    for i in range(len(nets)):
        losses.append(critic_update(batch, i, nets, cfg))
        norms.append(actor_update(batch, i, nets, cfg))
    for agent in nets:
        agent.target_actor = soft_update(agent.target_actor, agent.actor, cfg.tau)
        agent.target_critic = soft_update(agent.target_critic, agent.critic, cfg.tau)
    return losses, norms


# --- rollouts -------------------------------------------------------------


def act(actors: Sequence[nn.NetworkParams], state: env.WorldState, env_cfg: env.EnvConfig) -> np.ndarray:
    """Decentralised execution: actor i sees only observation i."""
    return np.stack([nn.predict(actors[i], env.observe(state, i, env_cfg)) for i in range(len(actors))])


def route_rewards(raw: np.ndarray, scheme: str, mode: str) -> np.ndarray:
    """Rewards as stored for learning.

    Shared mode hands every agent the team total; the swarming scheme is
    already a team total, so it passes through unchanged.
    """
    if mode == "per_agent" or scheme == "sw":
        return raw
    return np.full_like(raw, raw.sum())


@dataclass
class MetricRow:
    episode: int
    agent_id: int
    mean_reward: float
    shared_reward: float
    coverage_fraction: float
    wall_ms: float


@dataclass
class TrainResult:
    rows: list[MetricRow]
    nets: list[AgentNets]
    losses: list[float] = field(default_factory=list)


def _check_finite(nets: Sequence[AgentNets], episode: int, step: int):
    for i, agent in enumerate(nets):
        for name in ("actor", "critic", "target_actor", "target_critic"):
            if not getattr(agent, name).is_finite():
                raise TrainingDiverged(f"NaN/Inf in agent {i} {name} at episode {episode}, step {step}")


def _streams(seed: int):
    ss = np.random.SeedSequence(seed)
    return [np.random.default_rng(s) for s in ss.spawn(4)]


def train_run(env_cfg: env.EnvConfig, scheme: str, reward_spec, train_cfg: TrainConfig, seed: int,
              record_wall_time: bool = False,
              progress: Callable[[int, list[MetricRow]], None] | None = None) -> TrainResult:
    """Centralised training loop; deterministic per seed when wall time is off."""
    init_rng, spawn_rng, noise_rng, sample_rng = _streams(seed)
    n = env_cfg.n_agents
    nets = make_agents(n, env_cfg.obs_dim, env_cfg.act_dim, train_cfg, init_rng)
    buf = ReplayBuffer(train_cfg.buffer_capacity, n, env_cfg.obs_dim, env_cfg.act_dim)
    region_area = geo.region_polygon(env_cfg.region).area
    ready = max(train_cfg.warmup, train_cfg.batch_size)
    rows: list[MetricRow] = []
    losses: list[float] = []
    total_steps = 0
    for ep in range(train_cfg.episodes):
        t0 = time.perf_counter()
        sigma = train_cfg.noise_scale(ep)
        state = env.reset(env_cfg, spawn_rng)
        reward_sum = np.zeros(n)
        team_sum = 0.0
        covered = 0.0
        for t in range(env_cfg.steps_per_episode):
            x = env.joint_observation(state, env_cfg)
            a = act([nt.actor for nt in nets], state, env_cfg)
            if sigma > 0:
                a = a + noise_rng.normal(0.0, sigma, size=a.shape)
            a = np.clip(a, -1.0, 1.0)
            state = env.step(state, a, env_cfg)
            raw, covered = step_rewards(scheme, state, env_cfg.region, reward_spec,
                                        env_cfg.coverage_radius, env_cfg.coverage_edges)
            r = route_rewards(raw, scheme, train_cfg.reward_mode)
            buf.push(Transition(x, a.ravel(), r, env.joint_observation(state, env_cfg)))
            reward_sum += r
            team_sum += float(r[0]) if (scheme == "sw" or train_cfg.reward_mode == "shared") else float(r.sum())
            total_steps += 1
            if total_steps % train_cfg.update_every == 0 and len(buf) >= ready:
                ls, _ = update_tick(buf, nets, train_cfg, sample_rng)
                losses.extend(ls)
                _check_finite(nets, ep, t)
        steps = env_cfg.steps_per_episode
        wall = (time.perf_counter() - t0) * 1e3 if record_wall_time else 0.0
        frac = min(1.0, covered / region_area)
        ep_rows = [MetricRow(ep, i, float(reward_sum[i] / steps), team_sum / steps, frac, wall) for i in range(n)]
        rows.extend(ep_rows)
        if progress is not None:
            progress(ep, ep_rows)
    return TrainResult(rows, nets, losses)


@dataclass
class EvalSummary:
    mean_reward_per_agent: list[float]
    mean_reward: float
    final_coverage_fraction: float
    episodes: int

    def to_dict(self) -> dict:
        return {
            "episodes": self.episodes,
            "mean_reward": self.mean_reward,
            "mean_reward_per_agent": self.mean_reward_per_agent,
            "final_coverage_fraction": self.final_coverage_fraction,
        }


def evaluate(policies, env_cfg: env.EnvConfig, scheme: str, reward_spec, episodes: int, seed: int,
             reward_mode: str = "per_agent") -> EvalSummary:
    """Noise-free rollouts of the actors alone.

    ``policies`` may be actor parameter sets or :class:`AgentNets`; only the
    ``actor`` of the latter is read.
    """
    actors = [p.actor if hasattr(p, "actor") and not isinstance(p, nn.NetworkParams) else p for p in policies]
    if len(actors) != env_cfg.n_agents:
        raise ValueError(f"{len(actors)} policies for {env_cfg.n_agents} agents")
    rng = np.random.default_rng(seed)
    region_area = geo.region_polygon(env_cfg.region).area
    n = env_cfg.n_agents
    totals = np.zeros(n)
    fracs = []
    for _ in range(episodes):
        state = env.reset(env_cfg, rng)
        covered = 0.0
        for _ in range(env_cfg.steps_per_episode):
            state = env.step(state, act(actors, state, env_cfg), env_cfg)
            raw, covered = step_rewards(scheme, state, env_cfg.region, reward_spec,
                                        env_cfg.coverage_radius, env_cfg.coverage_edges)
            totals += route_rewards(raw, scheme, reward_mode)
        fracs.append(min(1.0, covered / region_area))
    per_agent = totals / max(1, episodes * env_cfg.steps_per_episode)
    return EvalSummary([float(v) for v in per_agent], float(per_agent.mean()),
                       float(np.mean(fracs)) if fracs else 0.0, episodes)
