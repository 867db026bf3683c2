"""Gaussian multiplier bootstrap over the critic class.

One draw re-randomizes the sample with i.i.d. standard normal multipliers
and maximizes the centered, scaled process over the same normalized
critic class used for dual estimation. T independent draws approximate
the sampling distribution of the scaled empirical distance; their
empirical quantiles provide the tests' critical values.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dual import maximize_weighted_mean
from .errors import InputError, NumericError
from .nn import CriticNet, TrainConfig, batch_forward, parameter_count
from .samples import Sample
from .seeds import stream


@dataclass(frozen=True)
class BootstrapDraws:
    """Sorted multiplier-bootstrap realizations plus the (n, S, seed)
    bookkeeping they were produced with."""

    draws: np.ndarray
    n: int
    parameter_count: int
    seed: int

    def __post_init__(self):
        arr = np.asarray(self.draws, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise InputError("draws must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(arr)):
            raise InputError("draws contain non-finite values")
        if np.any(np.diff(arr) < 0):
            raise InputError("draws must be sorted ascending")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "draws", arr)

    @property
    def T(self) -> int:
        return int(self.draws.size)


@dataclass
class DrawDetail:
    """Internals of one draw, exposed for bookkeeping checks: the reported
    value is exactly scale * centered_objective."""

    value: float
    centered_objective: float
    scale: float
    net: CriticNet | None


def draw_detail(x: Sample, cfg: TrainConfig, rng: np.random.Generator) -> DrawDetail:
    n = x.n
    S = parameter_count(x.d, cfg.hidden_widths)
    scale = math.sqrt(1.0 / (n * S))
    multipliers = rng.standard_normal(n)
    centered = multipliers - multipliers.mean()
    if not np.any(centered):
        # n == 1, or multipliers forced equal: the centered process is
        # identically zero and the zero function attains the supremum.
        return DrawDetail(0.0, 0.0, scale, None)
    net, _ = maximize_weighted_mean(x.data, scale * centered, cfg, rng)
    objective = float(centered @ batch_forward(net, x.data))
    if objective < 0.0:
        net.negate_output()
        objective = -objective  # the negated critic is feasible too
    return DrawDetail(scale * objective, objective, scale, net)


def bootstrap_draw(x: Sample, cfg: TrainConfig, rng: np.random.Generator) -> float:
    """One realization of the scaled multiplier supremum (always >= 0)."""
    return draw_detail(x, cfg, rng).value


def _draw_block(x: Sample, cfg: TrainConfig, seed: int, start: int, stop: int):
    out = []
    for i in range(start, stop):
        try:
            out.append(bootstrap_draw(x, cfg, stream(seed, i)))
        except NumericError as err:
            raise NumericError(f"draw {i}: {err}") from err
    return start, out


def run_bootstrap(
    x: Sample, T: int, cfg: TrainConfig | None = None, seed: int = 0, threads: int = 1
) -> BootstrapDraws:
    """T independent draws on seed-derived counter-based streams.

    Each draw i uses the stream keyed by (seed, i), so the result is
    bit-identical for any thread count or scheduling order.
    """
    if T < 1:
        raise InputError(f"T must be >= 1, got {T}")
    if cfg is None:
        cfg = TrainConfig()
    threads = max(1, int(threads))
    values = np.empty(T)
    if threads == 1 or T == 1:
        _, block = _draw_block(x, cfg, seed, 0, T)
        values[:] = block
    else:
        bounds = np.linspace(0, T, threads + 1).astype(int)
        ranges = [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_draw_block, x, cfg, seed, a, b) for a, b in ranges
            ]
            for fut in futures:
                start, block = fut.result()
                values[start : start + len(block)] = block
    values.sort()
    return BootstrapDraws(
        draws=values,
        n=x.n,
        parameter_count=parameter_count(x.d, cfg.hidden_widths),
        seed=int(seed),
    )


def empirical_quantile(draws: BootstrapDraws, level: float) -> float:
    """Conservative order-statistic quantile: the ceil(level * T)-th
    smallest draw (1-indexed)."""
    if not (0.0 < level < 1.0):
        raise InputError(f"quantile level must be in (0, 1), got {level}")
    T = draws.T
    k = math.ceil(level * T - 1e-12)
    return float(draws.draws[k - 1])
