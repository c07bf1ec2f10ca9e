"""Run configuration: one JSON document, unknown keys rejected.

Top-level sections and their keys mirror the dataclasses they build:
``env`` -> EnvConfig, ``sw`` -> SwRewardSpec, ``cr`` -> CrRewardSpec,
``train`` -> TrainConfig. ``region`` selects a custom region file, and
``eval`` / ``metrics`` hold harness options.
"""
from __future__ import annotations

import copy
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import geometry as geo
from .environment import Box, EnvConfig
from .learner import TrainConfig
from .rewards import CrRewardSpec, SwRewardSpec
from .scenarios import BEDOK_WIDTH, SCENARIOS, builtin_region


class ConfigError(ValueError):
    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


_ENV_KEYS = ("n_agents", "agent_radius", "coverage_radius", "coverage_edges", "dt", "damping", "u_max",
             "v_max", "steps_per_episode", "kinematics_mode", "observe_velocity", "spawn_box")

DEFAULTS: dict[str, Any] = {
    "scenario": "square3",
    "scheme": "cr",
    "env": {
        "n_agents": 9, "agent_radius": 0.08, "coverage_radius": 0.5, "coverage_edges": 30,
        "dt": 0.1, "damping": 0.25, "u_max": 1.0, "v_max": 1.0, "steps_per_episode": 25,
        "kinematics_mode": "velocity", "observe_velocity": False, "spawn_box": None,
    },
    "sw": {f.name: f.default for f in dataclasses.fields(SwRewardSpec)},
    "cr": {f.name: f.default for f in dataclasses.fields(CrRewardSpec)},
    "train": {f.name: f.default for f in dataclasses.fields(TrainConfig)},
    "region": {"file": None, "normalize_width": None, "translate": False, "bedok_width": BEDOK_WIDTH},
    "eval": {"episodes": 10},
    "metrics": {"wall_clock": False},
}
# left unset, reward routing follows the scheme: sw -> shared, cr -> per_agent
DEFAULTS["train"]["reward_mode"] = None

for sec in ("sw", "cr", "train"):
    for k, v in DEFAULTS[sec].items():
        if isinstance(v, tuple):
            DEFAULTS[sec][k] = list(v)


def _check_type(where: str, default, value, key: str):
    if value is None:
        if default is None or key in ("spawn_box", "file", "normalize_width", "reward_mode", "bedok_width"):
            return value
        raise ConfigError(where, "null is not allowed")
    if isinstance(default, bool) or key in ("observe_velocity", "translate", "wall_clock",
                                              "clip_overall_to_region"):
        if not isinstance(value, bool):
            raise ConfigError(where, f"expected true/false, got {value!r}")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(where, f"expected an integer, got {value!r}")
        return value
    if isinstance(default, float) or key in ("normalize_width", "bedok_width"):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(where, f"expected a number, got {value!r}")
        return float(value)
    if isinstance(default, str) or key in ("reward_mode", "file"):
        if not isinstance(value, str):
            raise ConfigError(where, f"expected a string, got {value!r}")
        return value
    if isinstance(default, list) or key == "spawn_box":
        if not isinstance(value, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
        ):
            raise ConfigError(where, f"expected a list of numbers, got {value!r}")
        return value
    return value


def merge(raw: dict, source: str = "<config>") -> dict:
    """Overlay a user document on the defaults, checking keys and types."""
    if not isinstance(raw, dict):
        raise ConfigError(source, "top level must be a JSON object")
    out = copy.deepcopy(DEFAULTS)
    for key, value in raw.items():
        where = f"{source}: {key}"
        if key not in DEFAULTS:
            raise ConfigError(where, "unknown key")
        if isinstance(DEFAULTS[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(where, "expected an object")
            for sub, v in value.items():
                if sub not in DEFAULTS[key]:
                    raise ConfigError(f"{where}.{sub}", "unknown key")
                out[key][sub] = _check_type(f"{where}.{sub}", DEFAULTS[key][sub], v, sub)
        else:
            out[key] = _check_type(where, DEFAULTS[key], value, key)
    if out["scenario"] not in SCENARIOS:
        raise ConfigError(f"{source}: scenario", f"unknown scenario {out['scenario']!r}")
    if out["scheme"] not in ("sw", "cr"):
        raise ConfigError(f"{source}: scheme", f"expected 'sw' or 'cr', got {out['scheme']!r}")
    if out["eval"]["episodes"] < 1:
        raise ConfigError(f"{source}: eval.episodes", "must be >= 1")
    return out


@dataclass
class RunConfig:
    doc: dict
    region: geo.Region
    env: EnvConfig
    sw: SwRewardSpec
    cr: CrRewardSpec
    train: TrainConfig
    source: str = "<config>"
    base_dir: Path = field(default_factory=Path.cwd)

    @property
    def scheme(self) -> str:
        return self.doc["scheme"]

    @property
    def reward_spec(self):
        return self.sw if self.scheme == "sw" else self.cr

    @property
    def eval_episodes(self) -> int:
        return self.doc["eval"]["episodes"]

    @property
    def wall_clock(self) -> bool:
        return self.doc["metrics"]["wall_clock"]

    def snapshot(self) -> dict:
        """Fully resolved document; feeding it back reproduces this config."""
        doc = copy.deepcopy(self.doc)
        doc["train"]["reward_mode"] = self.train.reward_mode
        if doc["region"]["file"] is not None:
            doc["region"]["file"] = str((self.base_dir / doc["region"]["file"]).resolve())
        return doc

    def snapshot_json(self) -> str:
        return json.dumps(self.snapshot(), indent=2, sort_keys=True) + "\n"


def _build(section: str, cls, kwargs: dict, source: str):
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{source}: {section}", str(exc)) from None


def build(doc: dict, source: str = "<config>", base_dir: Path | None = None) -> RunConfig:
    base_dir = Path.cwd() if base_dir is None else Path(base_dir)
    reg = doc["region"]
    try:
        if reg["file"] is not None:
            path = Path(reg["file"])
            if not path.is_absolute():
                path = base_dir / path
            region = geo.load_region(path, target_width=reg["normalize_width"], translate=reg["translate"])
        else:
            region = builtin_region(doc["scenario"], bedok_width=reg["bedok_width"])
    except geo.RegionFileError as exc:
        raise ConfigError(f"{source}: region.file", str(exc)) from None
    except (OSError, geo.GeometryError) as exc:
        raise ConfigError(f"{source}: region", str(exc)) from None

    env_kw = {k: doc["env"][k] for k in _ENV_KEYS}
    if env_kw["spawn_box"] is not None:
        if len(env_kw["spawn_box"]) != 4:
            raise ConfigError(f"{source}: env.spawn_box", "expected [x0, y0, x1, y1]")
        try:
            env_kw["spawn_box"] = Box(*map(float, env_kw["spawn_box"]))
        except ValueError as exc:
            raise ConfigError(f"{source}: env.spawn_box", str(exc)) from None
    env_cfg = _build("env", EnvConfig, {"region": region, **env_kw}, source)

    sw_kw = dict(doc["sw"])
    for k in ("prop_range", "coll_range"):
        if len(sw_kw[k]) != 2:
            raise ConfigError(f"{source}: sw.{k}", "expected [lower, upper]")
        sw_kw[k] = tuple(float(x) for x in sw_kw[k])
    sw = _build("sw", SwRewardSpec, sw_kw, source)
    cr = _build("cr", CrRewardSpec, dict(doc["cr"]), source)

    tr_kw = dict(doc["train"])
    if tr_kw["reward_mode"] is None:
        tr_kw["reward_mode"] = "shared" if doc["scheme"] == "sw" else "per_agent"
    tr_kw["hidden"] = tuple(tr_kw["hidden"])
    train = _build("train", TrainConfig, tr_kw, source)
    return RunConfig(doc, region, env_cfg, sw, cr, train, source, base_dir)


def parse_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Read a config file (or defaults when ``path`` is None) and apply overrides.

    ``overrides`` uses dotted keys, e.g. ``{"train.episodes": 100}``.
    """
    if path is None:
        raw, source, base = {}, "<defaults>", Path.cwd()
    else:
        path = Path(path)
        source, base = str(path), path.parent
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(source, f"cannot read: {exc.strerror}") from None
        try:
            raw = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}: line {exc.lineno} column {exc.colno}", exc.msg) from None
    raw = copy.deepcopy(raw)
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        *parents, leaf = dotted.split(".")
        node = raw
        for p in parents:
            node = node.setdefault(p, {})
        node[leaf] = value
    return build(merge(raw, source), source, base)
