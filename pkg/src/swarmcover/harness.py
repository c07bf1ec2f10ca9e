"""Subcommand implementations and artifact writers."""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import checkpoint as ckpt
from . import environment as env
from . import learner
from . import neural as nn
from . import svg
from .config import RunConfig

log = logging.getLogger(__name__)

METRICS_HEADER = ("episode", "agent_id", "mean_reward", "shared_reward", "coverage_fraction", "wall_ms")
METRICS_FILE = "metrics.csv"
CHECKPOINT_FILE = "checkpoint.bin"


class HarnessError(RuntimeError):
    pass


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def metrics_text(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRICS_HEADER)
    for r in rows:
        if not 0.0 <= r.coverage_fraction <= 1.0:
            raise ValueError(f"coverage_fraction {r.coverage_fraction} outside [0, 1]")
        w.writerow([_fmt(r.episode), _fmt(r.agent_id), _fmt(r.mean_reward), _fmt(r.shared_reward),
                    _fmt(r.coverage_fraction), _fmt(r.wall_ms)])
    return buf.getvalue()


def write_metrics(rows, path) -> Path:
    return ckpt.atomic_write(path, metrics_text(rows).encode("utf-8"))


def read_metrics(path) -> list[learner.MetricRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != METRICS_HEADER:
            raise ValueError(f"unexpected metrics header {header}")
        return [learner.MetricRow(int(a), int(b), float(c), float(d), float(e), float(f))
                for a, b, c, d, e, f in reader]


def episode_series(rows, column: str = "mean_reward") -> np.ndarray:
    """Per-episode average of a metrics column over agents."""
    eps = sorted({r.episode for r in rows})
    by = {e: [] for e in eps}
    for r in rows:
        by[r.episode].append(getattr(r, column))
    return np.array([np.mean(by[e]) for e in eps])


def _write_text(path: Path, text: str) -> Path:
    return ckpt.atomic_write(path, text.encode("utf-8"))


@dataclass
class RunRecord:
    config: dict
    seed: int
    rows: list
    checkpoint: Path
    metrics: Path

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "seed": self.seed,
            "episodes": len({r.episode for r in self.rows}),
            "metrics": self.metrics.name,
            "checkpoint": self.checkpoint.name,
        }


def cmd_train(cfg: RunConfig, seed: int, out: Path) -> RunRecord:
    out.mkdir(parents=True, exist_ok=True)
    log.info("training %s/%s for %d episodes, seed %d", cfg.doc["scenario"], cfg.scheme,
             cfg.train.episodes, seed)

    def progress(ep, rows):
        if (ep + 1) % 100 == 0:
            log.info("episode %d  reward %.3f  coverage %.3f", ep + 1,
                     float(np.mean([r.mean_reward for r in rows])), rows[0].coverage_fraction)

    res = learner.train_run(cfg.env, cfg.scheme, cfg.reward_spec, cfg.train, seed,
                            record_wall_time=cfg.wall_clock, progress=progress)
    metrics = write_metrics(res.rows, out / METRICS_FILE)
    cpath = ckpt.save(res.nets, out / CHECKPOINT_FILE)
    n = cfg.env.n_agents
    series = {f"agent {i}": [r.mean_reward for r in res.rows if r.agent_id == i] for i in range(n)}
    if cfg.train.reward_mode == "shared":
        series = {"shared": series["agent 0"]}
    smooth = max(1, cfg.train.episodes // 100)
    _write_text(out / "reward_curve.svg", svg.reward_curve(series, smooth=smooth))
    _write_text(out / "config.json", cfg.snapshot_json())
    record = RunRecord(cfg.snapshot(), seed, res.rows, cpath, metrics)
    _write_text(out / "run.json", json.dumps(record.to_dict(), indent=2, sort_keys=True) + "\n")
    return record


def _checkpoint_path(out: Path, checkpoint) -> Path:
    path = Path(checkpoint) if checkpoint else out / CHECKPOINT_FILE
    if not path.is_file():
        raise HarnessError(f"checkpoint not found: {path} (run 'train' first or pass --checkpoint)")
    return path


def load_policies(cfg: RunConfig, path: Path) -> list[learner.AgentNets]:
    nets = ckpt.load(path)
    if len(nets) != cfg.env.n_agents:
        raise HarnessError(f"checkpoint holds {len(nets)} agents, config expects {cfg.env.n_agents}")
    if nets[0].actor.spec.n_in != cfg.env.obs_dim:
        raise HarnessError("checkpoint observation size does not match the config")
    return nets


def cmd_eval(cfg: RunConfig, seed: int, out: Path, checkpoint=None) -> dict:
    path = _checkpoint_path(out, checkpoint)
    nets = load_policies(cfg, path)
    summary = learner.evaluate([a.actor for a in nets], cfg.env, cfg.scheme, cfg.reward_spec,
                               cfg.eval_episodes, seed, reward_mode=cfg.train.reward_mode)
    doc = {"checkpoint": str(path), "seed": seed, "scheme": cfg.scheme, **summary.to_dict()}
    out.mkdir(parents=True, exist_ok=True)
    _write_text(out / "eval.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return doc


def rollout_positions(actors, env_cfg: env.EnvConfig, seed: int, steps: int | None = None) -> np.ndarray:
    state = env.reset(env_cfg, seed)
    for _ in range(env_cfg.steps_per_episode if steps is None else steps):
        state = env.step(state, learner.act(actors, state, env_cfg), env_cfg)
    return state.positions


def cmd_render(cfg: RunConfig, seed: int, out: Path, checkpoint=None) -> Path:
    """Snapshot after one noise-free episode, or the spawn state without a checkpoint."""
    path = Path(checkpoint) if checkpoint else out / CHECKPOINT_FILE
    if path.is_file():
        actors = [a.actor for a in load_policies(cfg, path)]
        pos = rollout_positions(actors, cfg.env, seed)
    elif checkpoint:
        raise HarnessError(f"checkpoint not found: {path}")
    else:
        pos = env.reset(cfg.env, seed).positions
    text = svg.snapshot(cfg.region, pos, cfg.env.coverage_radius, cfg.env.coverage_edges, cfg.env.agent_radius)
    out.mkdir(parents=True, exist_ok=True)
    return _write_text(out / "snapshot.svg", text)


def cmd_gradcheck(cfg: RunConfig, seed: int, out: Path, n_seeds: int = 3) -> dict:
    hidden = cfg.train.hidden
    specs = {
        "actor": nn.actor_spec(cfg.env.obs_dim, cfg.env.act_dim, hidden),
        "critic": nn.critic_spec(cfg.env.n_agents, cfg.env.obs_dim, cfg.env.act_dim, hidden),
    }
    doc = {name: [nn.gradient_check(spec, seed + k) for k in range(n_seeds)] for name, spec in specs.items()}
    doc["max_relative_error"] = max(max(v) for v in doc.values())
    out.mkdir(parents=True, exist_ok=True)
    _write_text(out / "gradcheck.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return doc
