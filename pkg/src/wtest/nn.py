"""Feedforward ReLU critics with manual backprop and spectral-norm control.

A critic is a stack of dense layers with ReLU activations and a scalar
output. Keeping every weight matrix inside the unit spectral-norm ball
makes the whole network 1-Lipschitz for the Euclidean norm (ReLU is
1-Lipschitz, and the layer norms multiply).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, DimensionError, NumericError

SPECTRAL_SLACK = 1e-6  # numerical slack allowed on the unit-norm constraint

_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8


@dataclass
class TrainConfig:
    """Architecture and optimizer settings for critic training.

    ``batch_size=None`` means full-batch gradients. ``power_iterations``
    is the per-step budget of the spectral-norm estimator (warm-started,
    so 1 is enough during training).
    """

    hidden_widths: tuple[int, ...] = (100, 100, 100)
    optimizer: str = "adam"
    learning_rate: float = 1e-3
    epochs: int = 500
    batch_size: int | None = None
    power_iterations: int = 1
    seed: int = 0

    def __post_init__(self):
        self.hidden_widths = tuple(int(w) for w in self.hidden_widths)
        if not self.hidden_widths or any(w < 1 for w in self.hidden_widths):
            raise ConfigurationError(f"hidden_widths must be positive: {self.hidden_widths}")
        if self.optimizer not in ("sgd", "adam"):
            raise ConfigurationError(f"unknown optimizer {self.optimizer!r}")
        if not (self.learning_rate > 0):
            raise ConfigurationError("learning_rate must be > 0")
        if self.epochs < 1:
            raise ConfigurationError("epochs must be >= 1")
        if self.batch_size is not None and self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1 or None for full batch")
        if self.power_iterations < 1:
            raise ConfigurationError("power_iterations must be >= 1")
        self.seed = int(self.seed)

    def with_seed(self, seed: int) -> "TrainConfig":
        return replace(self, seed=int(seed))

    def to_dict(self) -> dict:
        return {
            "hidden_widths": list(self.hidden_widths),
            "optimizer": self.optimizer,
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "power_iterations": self.power_iterations,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "TrainConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigurationError(f"unknown config fields: {sorted(unknown)}")
        kwargs = dict(raw)
        if "hidden_widths" in kwargs:
            kwargs["hidden_widths"] = tuple(kwargs["hidden_widths"])
        return cls(**kwargs)

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


@dataclass
class LayerParams:
    """One dense layer: weight (out, in), bias (out,), and the persisted
    power-iteration vector used to warm-start spectral-norm estimates."""

    weight: np.ndarray
    bias: np.ndarray
    power_vec: np.ndarray

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    def copy(self) -> "LayerParams":
        return LayerParams(self.weight.copy(), self.bias.copy(), self.power_vec.copy())


@dataclass
class CriticNet:
    """Layered ReLU network mapping R^d -> R."""

    layers: list[LayerParams]

    def __post_init__(self):
        if not self.layers:
            raise ConfigurationError("network needs at least one layer")
        for i, layer in enumerate(self.layers):
            if layer.weight.ndim != 2 or layer.bias.shape != (layer.out_dim,):
                raise DimensionError(f"layer {i}: inconsistent weight/bias shapes")
            if i > 0 and layer.in_dim != self.layers[i - 1].out_dim:
                raise DimensionError(
                    f"layer {i}: input dim {layer.in_dim} != previous output "
                    f"dim {self.layers[i - 1].out_dim}"
                )
        if self.layers[-1].out_dim != 1:
            raise DimensionError("final layer must have a single output")

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def hidden_count(self) -> int:
        return len(self.layers) - 1

    @property
    def parameter_count(self) -> int:
        """Total parameter budget of the architecture (weights + biases)."""
        return sum(l.weight.size + l.bias.size for l in self.layers)

    def nonzero_parameter_count(self) -> int:
        """Entries with |value| > 0, recomputed on demand."""
        return int(
            sum(np.count_nonzero(l.weight) + np.count_nonzero(l.bias) for l in self.layers)
        )

    def copy(self) -> "CriticNet":
        return CriticNet([l.copy() for l in self.layers])

    def negate_output(self) -> None:
        """Flip the sign of the represented function (exact in IEEE)."""
        last = self.layers[-1]
        last.weight = -last.weight
        last.bias = -last.bias


def parameter_count(d: int, hidden_widths: tuple[int, ...]) -> int:
    """Parameter budget of the architecture without building a network."""
    dims = [int(d), *(int(w) for w in hidden_widths), 1]
    return sum(dims[i + 1] * dims[i] + dims[i + 1] for i in range(len(dims) - 1))


def init_critic(d: int, cfg: TrainConfig, rng: np.random.Generator) -> CriticNet:
    """He-scaled uniform init, then each weight matrix is divided by its
    spectral norm so the network is 1-Lipschitz from the first step.
    Biases start at zero."""
    if d < 1:
        raise ConfigurationError(f"input dimension must be >= 1, got {d}")
    dims = [int(d), *cfg.hidden_widths, 1]
    layers = []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = math.sqrt(6.0 / fan_in)
        weight = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        u = rng.standard_normal(fan_out)
        u /= np.linalg.norm(u)
        layers.append(LayerParams(weight, np.zeros(fan_out), u))
    net = CriticNet(layers)
    for layer in net.layers:
        top = float(np.linalg.norm(layer.weight, 2))
        if top > 0.0:
            layer.weight = layer.weight / top
    return net


def batch_forward(net: CriticNet, X: np.ndarray) -> np.ndarray:
    """Network outputs for every row of X, shape (n,)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != net.input_dim:
        raise DimensionError(
            f"expected inputs of shape (n, {net.input_dim}), got {X.shape}"
        )
    a = X
    for layer in net.layers[:-1]:
        a = np.maximum(a @ layer.weight.T + layer.bias, 0.0)
    last = net.layers[-1]
    return (a @ last.weight.T + last.bias)[:, 0]


def forward(net: CriticNet, x: np.ndarray) -> float:
    """Scalar output for a single input vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise DimensionError(f"expected input of shape ({net.input_dim},), got {x.shape}")
    return float(batch_forward(net, x.reshape(1, -1))[0])


def _forward_cached(net, X):
    acts = [X]  # inputs to each layer
    pres = []   # hidden pre-activations
    a = X
    for layer in net.layers[:-1]:
        z = a @ layer.weight.T + layer.bias
        pres.append(z)
        a = np.maximum(z, 0.0)
        acts.append(a)
    last = net.layers[-1]
    out = (a @ last.weight.T + last.bias)[:, 0]
    return out, acts, pres


def batch_gradient(
    net: CriticNet, objective_weights: np.ndarray, X: np.ndarray
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Gradient of sum_i w_i f(X_i) w.r.t. all parameters.

    Exact for the piecewise-linear network; the ReLU subgradient at a
    kink is taken as 0. Returns one (dweight, dbias) pair per layer.
    """
    X = np.asarray(X, dtype=np.float64)
    w = np.asarray(objective_weights, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != net.input_dim:
        raise DimensionError(
            f"expected inputs of shape (n, {net.input_dim}), got {X.shape}"
        )
    if w.shape != (X.shape[0],):
        raise DimensionError(
            f"expected {X.shape[0]} objective weights, got shape {w.shape}"
        )
    _, acts, pres = _forward_cached(net, X)
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(net.layers)

    delta = w.reshape(-1, 1)  # upstream for the linear output layer
    last = net.layers[-1]
    grads[-1] = (delta.T @ acts[-1], delta.sum(axis=0))
    g = delta @ last.weight  # (n, width of last hidden layer)
    for i in range(len(net.layers) - 2, -1, -1):
        g = g * (pres[i] > 0.0)
        grads[i] = (g.T @ acts[i], g.sum(axis=0))
        if i > 0:
            g = g @ net.layers[i].weight
    return grads


def spectral_normalize(
    net: CriticNet, power_iterations: int = 1, rng: np.random.Generator | None = None
) -> CriticNet:
    """Divide each weight matrix by its estimated top singular value when
    that estimate exceeds 1 (dividing below 1 would shrink the class).

    The per-layer power-iteration vector persists on the net, so repeated
    calls during training warm-start from the previous estimate.
    """
    if power_iterations < 1:
        raise ConfigurationError("power_iterations must be >= 1")
    for layer in net.layers:
        u = layer.power_vec
        if u is None or u.shape != (layer.out_dim,):
            if rng is not None:
                u = rng.standard_normal(layer.out_dim)
            else:
                u = np.ones(layer.out_dim)
            u = u / np.linalg.norm(u)
        sigma = 0.0
        for _ in range(power_iterations):
            v = layer.weight.T @ u
            nv = np.linalg.norm(v)
            if nv == 0.0:
                sigma = 0.0
                break
            v /= nv
            wv = layer.weight @ v
            sigma = float(np.linalg.norm(wv))
            if sigma > 0.0:
                u = wv / sigma
        layer.power_vec = u
        if sigma > 1.0:
            layer.weight = layer.weight / sigma
    return net


def _top_singular_value(
    weight: np.ndarray, u0: np.ndarray, tol: float, max_iterations: int
) -> float:
    """Power-iteration estimate, converged to `tol` on successive values."""
    u = u0 / np.linalg.norm(u0)
    sigma = 0.0
    for _ in range(max_iterations):
        v = weight.T @ u
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return 0.0
        v /= nv
        wv = weight @ v
        new_sigma = float(np.linalg.norm(wv))
        if new_sigma == 0.0:
            return 0.0
        u = wv / new_sigma
        if abs(new_sigma - sigma) <= tol:
            return new_sigma
        sigma = new_sigma
    return sigma


def lipschitz_upper_bound(
    net: CriticNet, tol: float = 1e-8, max_iterations: int = 10_000
) -> float:
    """Product of per-layer top singular values (converged power iteration).

    Upper-bounds the Lipschitz constant of the network. Read-only: the
    persisted power vectors are not modified, so this is safe to call on
    shared nets.
    """
    product = 1.0
    for layer in net.layers:
        u0 = layer.power_vec
        if u0 is None or np.linalg.norm(u0) == 0.0:
            u0 = np.ones(layer.out_dim)
        product *= _top_singular_value(layer.weight, u0.copy(), tol, max_iterations)
    return product


def exact_spectral_normalize(net: CriticNet) -> CriticNet:
    """Clamped division by the exact (SVD) spectral norm of each layer.

    Used to certify a finished critic: afterwards the true layer-norm
    product is <= 1 up to LAPACK precision.
    """
    for layer in net.layers:
        top = float(np.linalg.norm(layer.weight, 2))
        if top > 1.0:
            layer.weight = layer.weight / top
    return net


@dataclass
class OptimizerState:
    """Optimizer accumulators. Adam keeps first/second moments per layer
    and the step counter; SGD is stateless."""

    kind: str
    step: int = 0
    m: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    v: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)


def init_optimizer_state(net: CriticNet, cfg: TrainConfig) -> OptimizerState:
    state = OptimizerState(kind=cfg.optimizer)
    if cfg.optimizer == "adam":
        for layer in net.layers:
            state.m.append((np.zeros_like(layer.weight), np.zeros_like(layer.bias)))
            state.v.append((np.zeros_like(layer.weight), np.zeros_like(layer.bias)))
    return state


def optimizer_step(
    net: CriticNet,
    grads: list[tuple[np.ndarray, np.ndarray]],
    state: OptimizerState,
    cfg: TrainConfig,
) -> tuple[CriticNet, OptimizerState]:
    """One ascent step (the training objectives are maximized)."""
    for i, (gw, gb) in enumerate(grads):
        if not (np.all(np.isfinite(gw)) and np.all(np.isfinite(gb))):
            raise NumericError(f"non-finite gradient in layer {i}")
    lr = cfg.learning_rate
    if state.kind == "sgd":
        for layer, (gw, gb) in zip(net.layers, grads):
            layer.weight = layer.weight + lr * gw
            layer.bias = layer.bias + lr * gb
    else:
        state.step += 1
        t = state.step
        bc1 = 1.0 - _ADAM_BETA1**t
        bc2 = 1.0 - _ADAM_BETA2**t
        for i, (layer, (gw, gb)) in enumerate(zip(net.layers, grads)):
            mw, mb = state.m[i]
            vw, vb = state.v[i]
            mw = _ADAM_BETA1 * mw + (1.0 - _ADAM_BETA1) * gw
            mb = _ADAM_BETA1 * mb + (1.0 - _ADAM_BETA1) * gb
            vw = _ADAM_BETA2 * vw + (1.0 - _ADAM_BETA2) * gw**2
            vb = _ADAM_BETA2 * vb + (1.0 - _ADAM_BETA2) * gb**2
            state.m[i] = (mw, mb)
            state.v[i] = (vw, vb)
            layer.weight = layer.weight + lr * (mw / bc1) / (np.sqrt(vw / bc2) + _ADAM_EPS)
            layer.bias = layer.bias + lr * (mb / bc1) / (np.sqrt(vb / bc2) + _ADAM_EPS)
    return net, state
