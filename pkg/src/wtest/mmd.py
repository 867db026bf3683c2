"""MMD two-sample baseline: unbiased Gaussian-kernel estimator with a
permutation-calibrated test and median-heuristic bandwidth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import InputError
from .samples import Sample


@dataclass(frozen=True)
class MmdReport:
    mmd2_unbiased: float
    bandwidth: float
    permutations: int
    p_value: float
    decision: str
    alpha: float
    n: int
    m: int
    seed: int

    def __post_init__(self):
        if not (0.0 < self.p_value <= 1.0):
            raise InputError(f"p_value {self.p_value} outside (0, 1]")


def _gaussian_kernel(sq_dists: np.ndarray, bandwidth: float) -> np.ndarray:
    return np.exp(-sq_dists / (2.0 * bandwidth**2))


def mmd2_unbiased(x: Sample, y: Sample, bandwidth: float) -> float:
    """U-statistic estimator of squared MMD with kernel
    k(a, b) = exp(-||a - b||^2 / (2 h^2)). May be negative."""
    if x.n < 2 or y.n < 2:
        raise InputError(f"both samples need n >= 2, got {x.n} and {y.n}")
    if not bandwidth > 0:
        raise InputError(f"bandwidth must be positive, got {bandwidth}")
    n, m = x.n, y.n
    kxx = _gaussian_kernel(cdist(x.data, x.data, "sqeuclidean"), bandwidth)
    kyy = _gaussian_kernel(cdist(y.data, y.data, "sqeuclidean"), bandwidth)
    kxy = _gaussian_kernel(cdist(x.data, y.data, "sqeuclidean"), bandwidth)
    term_xx = (kxx.sum() - np.trace(kxx)) / (n * (n - 1))
    term_yy = (kyy.sum() - np.trace(kyy)) / (m * (m - 1))
    term_xy = kxy.sum() / (n * m)
    return float(term_xx + term_yy - 2.0 * term_xy)


def median_heuristic_bandwidth(x: Sample, y: Sample) -> float:
    """Median pairwise Euclidean distance of the pooled sample."""
    pooled = np.vstack([x.data, y.data])
    med = float(np.median(pdist(pooled)))
    return med if med > 0.0 else 1.0


def mmd_permutation_test(
    x: Sample,
    y: Sample,
    alpha: float,
    permutations: int = 200,
    seed: int = 0,
    bandwidth: float | None = None,
) -> MmdReport:
    """Permutation null by reshuffling pooled labels.

    p = (1 + #{permuted stats >= observed}) / (1 + permutations);
    Reject iff p <= alpha.
    """
    if permutations < 50:
        raise InputError(f"permutations must be >= 50, got {permutations}")
    if not (0.0 < alpha < 1.0):
        raise InputError(f"alpha must be in (0, 1), got {alpha}")
    if x.d != y.d:
        raise InputError(f"dimension mismatch: {x.d} vs {y.d}")
    if bandwidth is None:
        bandwidth = median_heuristic_bandwidth(x, y)
    elif not bandwidth > 0:
        raise InputError(f"bandwidth must be positive, got {bandwidth}")
    n, m = x.n, y.n
    if n < 2 or m < 2:
        raise InputError(f"both samples need n >= 2, got {n} and {m}")
    pooled = np.vstack([x.data, y.data])
    kernel = _gaussian_kernel(cdist(pooled, pooled, "sqeuclidean"), bandwidth)

    def stat(ix: np.ndarray, iy: np.ndarray) -> float:
        kxx = kernel[np.ix_(ix, ix)]
        kyy = kernel[np.ix_(iy, iy)]
        kxy = kernel[np.ix_(ix, iy)]
        return float(
            (kxx.sum() - np.trace(kxx)) / (n * (n - 1))
            + (kyy.sum() - np.trace(kyy)) / (m * (m - 1))
            - 2.0 * kxy.sum() / (n * m)
        )

    observed = stat(np.arange(n), np.arange(n, n + m))
    rng = np.random.default_rng(seed)
    exceed = 0
    for _ in range(permutations):
        perm = rng.permutation(n + m)
        if stat(perm[:n], perm[n:]) >= observed:
            exceed += 1
    p_value = (1 + exceed) / (1 + permutations)
    return MmdReport(
        mmd2_unbiased=observed,
        bandwidth=float(bandwidth),
        permutations=permutations,
        p_value=p_value,
        decision="Reject" if p_value <= alpha else "Accept",
        alpha=alpha,
        n=n,
        m=m,
        seed=int(seed),
    )
