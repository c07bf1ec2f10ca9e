"""Dense ReLU networks with hand-written backprop and Adam, in float64."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MlpSpec:
    layer_sizes: tuple[int, ...]
    hidden_activation: str = "relu"
    output_activation: str = "none"

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2 or min(sizes) < 1:
            raise ValueError(f"need >= 2 positive layer sizes, got {self.layer_sizes}")
        if self.hidden_activation != "relu":
            raise ValueError(f"unsupported hidden activation {self.hidden_activation!r}")
        if self.output_activation not in ("none", "tanh"):
            raise ValueError(f"unsupported output activation {self.output_activation!r}")
        object.__setattr__(self, "layer_sizes", sizes)

    @property
    def n_in(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_out(self) -> int:
        return self.layer_sizes[-1]

    @property
    def shapes(self) -> list[tuple[tuple[int, int], tuple[int]]]:
        s = self.layer_sizes
        return [((s[k], s[k + 1]), (s[k + 1],)) for k in range(len(s) - 1)]

    @property
    def n_params(self) -> int:
        return sum(a * b + b for (a, b), _ in self.shapes)

    def to_dict(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "hidden_activation": self.hidden_activation,
            "output_activation": self.output_activation,
        }


def actor_spec(obs_dim: int = 2, act_dim: int = 2, hidden=(64, 64)) -> MlpSpec:
    return MlpSpec((obs_dim, *hidden, act_dim), output_activation="tanh")


def critic_spec(n_agents: int, obs_dim: int = 2, act_dim: int = 2, hidden=(64, 64)) -> MlpSpec:
    return MlpSpec((n_agents * (obs_dim + act_dim), *hidden, 1), output_activation="none")


@dataclass
class NetworkParams:
    """Weights are stored (fan_in, fan_out) so a batch maps as x @ W + b."""

    spec: MlpSpec
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        if len(self.weights) != len(self.spec.shapes) or len(self.biases) != len(self.spec.shapes):
            raise ValueError("layer count does not match spec")
        for k, ((ws, bs), w, b) in enumerate(zip(self.spec.shapes, self.weights, self.biases)):
            if w.shape != ws or b.shape != bs:
                raise ValueError(f"layer {k}: shapes {w.shape}/{b.shape} do not match spec {ws}/{bs}")

    def arrays(self) -> list[np.ndarray]:
        """Parameter arrays in declared order: W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    @classmethod
    def from_flat(cls, spec: MlpSpec, vec) -> "NetworkParams":
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (spec.n_params,):
            raise ValueError(f"expected {spec.n_params} values, got {vec.shape}")
        ws, bs, k = [], [], 0
        for (a, b), _ in spec.shapes:
            ws.append(vec[k : k + a * b].reshape(a, b).copy())
            k += a * b
            bs.append(vec[k : k + b].copy())
            k += b
        return cls(spec, ws, bs)

    def copy(self) -> "NetworkParams":
        return NetworkParams(self.spec, [w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def zeros_like(self) -> "NetworkParams":
        return NetworkParams(self.spec, [np.zeros_like(w) for w in self.weights],
                             [np.zeros_like(b) for b in self.biases])

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())


def init_params(spec: MlpSpec, rng) -> NetworkParams:
    """Uniform Glorot initialisation, zero biases."""
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    ws, bs = [], []
    for (a, b), _ in spec.shapes:
        lim = np.sqrt(6.0 / (a + b))
        ws.append(rng.uniform(-lim, lim, size=(a, b)))
        bs.append(np.zeros(b))
    return NetworkParams(spec, ws, bs)


def zero_params(spec: MlpSpec) -> NetworkParams:
    return NetworkParams(spec, [np.zeros(ws) for ws, _ in spec.shapes], [np.zeros(bs) for _, bs in spec.shapes])


@dataclass
class Cache:
    inputs: list[np.ndarray]
    pre: list[np.ndarray]
    output: np.ndarray
    squeeze: bool = False


def forward(params: NetworkParams, x) -> tuple[np.ndarray, Cache]:
    """Evaluate on a single input vector or a (batch, n_in) array."""
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    h = x[None, :] if squeeze else x
    if h.ndim != 2 or h.shape[1] != params.spec.n_in:
        raise ValueError(f"input shape {x.shape} does not match n_in={params.spec.n_in}")
    inputs, pre = [], []
    last = len(params.weights) - 1
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        inputs.append(h)
        z = h @ w + b
        pre.append(z)
        if k < last:
            h = np.maximum(z, 0.0)
        elif params.spec.output_activation == "tanh":
            h = np.tanh(z)
        else:
            h = z
    out = h[0] if squeeze else h
    return out, Cache(inputs, pre, h, squeeze)


def predict(params: NetworkParams, x) -> np.ndarray:
    return forward(params, x)[0]


def backward(params: NetworkParams, cache: Cache, upstream) -> tuple[NetworkParams, np.ndarray]:
    """Gradients of sum(output * upstream) w.r.t. parameters and input."""
    g = np.asarray(upstream, dtype=np.float64)
    if cache.squeeze:
        g = g[None, :] if g.ndim == 1 else g
    if g.shape != cache.output.shape:
        raise ValueError(f"upstream shape {g.shape} does not match output {cache.output.shape}")
    if len(cache.pre) != len(params.weights):
        raise ValueError("cache does not come from this network")
    if params.spec.output_activation == "tanh":
        g = g * (1.0 - cache.output**2)
    n = len(params.weights)
    gw, gb = [None] * n, [None] * n
    for k in range(n - 1, -1, -1):
        gw[k] = cache.inputs[k].T @ g
        gb[k] = g.sum(axis=0)
        g = g @ params.weights[k].T
        if k > 0:
            g = g * (cache.pre[k - 1] > 0)
    dx = g[0] if cache.squeeze else g
    return NetworkParams(params.spec, gw, gb), dx


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    step: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: NetworkParams, lr: float = 1e-3, beta1: float = 0.9,
                   beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        if not 0 < lr <= 1:
            raise ValueError("learning rate must lie in (0, 1]")
        arrs = params.arrays()
        return cls([np.zeros_like(a) for a in arrs], [np.zeros_like(a) for a in arrs], 0, lr, beta1, beta2, eps)

    def copy(self) -> "AdamState":
        return AdamState([a.copy() for a in self.m], [a.copy() for a in self.v], self.step,
                         self.lr, self.beta1, self.beta2, self.eps)


def adam_step(params: NetworkParams, grads: NetworkParams, state: AdamState,
              maximize: bool = False) -> tuple[NetworkParams, AdamState]:
    """One bias-corrected Adam update; returns fresh params and state."""
    ps, gs = params.arrays(), grads.arrays()
    if len(ps) != len(gs) or any(p.shape != g.shape for p, g in zip(ps, gs)):
        raise ValueError("gradient shapes do not match parameters")
    if not all(np.all(np.isfinite(g)) for g in gs):
        raise FloatingPointError("non-finite gradient passed to adam_step")
    t = state.step + 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t
    sign = 1.0 if maximize else -1.0
    new_p, new_m, new_v = [], [], []
    for p, g, m, v in zip(ps, gs, state.m, state.v):
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * g * g
        new_p.append(p + sign * state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps))
        new_m.append(m)
        new_v.append(v)
    out = NetworkParams(params.spec, new_p[0::2], new_p[1::2])
    return out, AdamState(new_m, new_v, t, state.lr, b1, b2, state.eps)


def relative_error(a, b, floor: float = 1e-6) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float(np.max(np.abs(a - b) / denom)) if a.size else 0.0


def numeric_param_gradient(fn, params: NetworkParams, h: float = 1e-5) -> np.ndarray:
    """Central differences of scalar fn(params) over every parameter."""
    base = params.flat()
    grad = np.empty_like(base)
    for k in range(len(base)):
        orig = base[k]
        base[k] = orig + h
        fp = fn(NetworkParams.from_flat(params.spec, base))
        base[k] = orig - h
        fm = fn(NetworkParams.from_flat(params.spec, base))
        base[k] = orig
        grad[k] = (fp - fm) / (2.0 * h)
    return grad


def gradient_check(spec: MlpSpec, seed: int = 0, params: NetworkParams | None = None,
                   batch: int = 2, h: float = 1e-5) -> float:
    """Max relative error between backward and central differences.

    Covers every parameter and the input gradient of a seeded random network
    on a seeded random input and upstream vector.
    """
    rng = np.random.default_rng(seed)
    if params is None:
        params = init_params(spec, rng)
        # nonzero biases so the check does not sit on the ReLU kink
        params = NetworkParams(spec, params.weights, [rng.normal(0, 0.1, b.shape) for b in params.biases])
    x = rng.normal(size=(batch, spec.n_in))
    up = rng.normal(size=(batch, spec.n_out))

    def loss(p, xx=x):
        return float(np.sum(forward(p, xx)[0] * up))

    out, cache = forward(params, x)
    grads, dx = backward(params, cache, up)
    num = numeric_param_gradient(loss, params, h)
    err = relative_error(grads.flat(), num)
    num_dx = np.empty_like(x)
    for idx in np.ndindex(*x.shape):
        xp, xm = x.copy(), x.copy()
        xp[idx] += h
        xm[idx] -= h
        num_dx[idx] = (loss(params, xp) - loss(params, xm)) / (2.0 * h)
    return max(err, relative_error(dx, num_dx))
