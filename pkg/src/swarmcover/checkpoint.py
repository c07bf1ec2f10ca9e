"""Binary checkpoint of all agents' networks and optimizer moments.

Layout (little-endian):

    magic      8 bytes  b"SWCVCKPT"
    version    uint32
    n_agents   uint32
    header_len uint32
    header     header_len bytes of UTF-8 JSON (network specs, Adam settings)
    payload    float64 arrays, per agent in this order:
               actor, critic, target_actor, target_critic  (W0, b0, W1, b1, ...)
               actor Adam m, actor Adam v, critic Adam m, critic Adam v
"""
from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from . import neural as nn
from .learner import AgentNets

MAGIC = b"SWCVCKPT"
VERSION = 1
_PREFIX = struct.Struct("<8sIII")
_F8 = np.dtype("<f8")


class CheckpointError(ValueError):
    pass


def _adam_header(s: nn.AdamState) -> dict:
    return {"step": s.step, "lr": s.lr, "beta1": s.beta1, "beta2": s.beta2, "eps": s.eps}


def encode(nets: list[AgentNets]) -> bytes:
    if not nets:
        raise CheckpointError("no agents to save")
    a_spec, c_spec = nets[0].actor.spec, nets[0].critic.spec
    header = {
        "actor": a_spec.to_dict(),
        "critic": c_spec.to_dict(),
        "adam": [{"actor": _adam_header(a.actor_opt), "critic": _adam_header(a.critic_opt)} for a in nets],
    }
    hbytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    chunks = [_PREFIX.pack(MAGIC, VERSION, len(nets), len(hbytes)), hbytes]
    for a in nets:
        if a.actor.spec != a_spec or a.critic.spec != c_spec:
            raise CheckpointError("all agents must share network shapes")
        arrays = (a.actor.arrays() + a.critic.arrays() + a.target_actor.arrays() + a.target_critic.arrays()
                  + a.actor_opt.m + a.actor_opt.v + a.critic_opt.m + a.critic_opt.v)
        chunks.extend(np.ascontiguousarray(x, dtype=_F8).tobytes() for x in arrays)
    return b"".join(chunks)


def _spec(d: dict) -> nn.MlpSpec:
    return nn.MlpSpec(tuple(d["layer_sizes"]), d["hidden_activation"], d["output_activation"])


def decode(data: bytes) -> list[AgentNets]:
    if len(data) < _PREFIX.size:
        raise CheckpointError("file too short for a checkpoint header")
    magic, version, n, hlen = _PREFIX.unpack_from(data)
    if magic != MAGIC:
        raise CheckpointError("not a swarmcover checkpoint (bad magic)")
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    pos = _PREFIX.size
    try:
        header = json.loads(data[pos : pos + hlen].decode("utf-8"))
        a_spec, c_spec = _spec(header["actor"]), _spec(header["critic"])
        adam = header["adam"]
    except (ValueError, KeyError, TypeError) as exc:
        raise CheckpointError(f"corrupt checkpoint header: {exc}") from None
    if len(adam) != n:
        raise CheckpointError("header agent count mismatch")
    pos += hlen
    per_agent = 4 * (a_spec.n_params + c_spec.n_params)
    expected = pos + n * per_agent * _F8.itemsize
    if len(data) != expected:
        raise CheckpointError(f"payload size {len(data)} bytes, expected {expected}")
    flat = np.frombuffer(data, dtype=_F8, offset=pos).astype(np.float64)

    def take(k, size):
        return flat[k : k + size], k + size

    nets, k = [], 0

    def net(spec, k):
        vec, k = take(k, spec.n_params)
        return nn.NetworkParams.from_flat(spec, vec), k

    for i in range(n):
        actor, k = net(a_spec, k)
        critic, k = net(c_spec, k)
        t_actor, k = net(a_spec, k)
        t_critic, k = net(c_spec, k)
        am, k = net(a_spec, k)
        av, k = net(a_spec, k)
        cm, k = net(c_spec, k)
        cv, k = net(c_spec, k)
        ha, hc = adam[i]["actor"], adam[i]["critic"]
        a_opt = nn.AdamState(am.arrays(), av.arrays(), ha["step"], ha["lr"], ha["beta1"], ha["beta2"], ha["eps"])
        c_opt = nn.AdamState(cm.arrays(), cv.arrays(), hc["step"], hc["lr"], hc["beta1"], hc["beta2"], hc["eps"])
        nets.append(AgentNets(actor, critic, t_actor, t_critic, a_opt, c_opt))
    return nets


def atomic_write(path, data: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def save(nets: list[AgentNets], path) -> Path:
    return atomic_write(path, encode(nets))


def load(path) -> list[AgentNets]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    return decode(path.read_bytes())
