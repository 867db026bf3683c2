"""One-sample and two-sample distance tests, confidence intervals, the
parameter-budget check, the anti-concentration diagnostic, and reference
distributions for Q-Q validation.

Both tests compare a scaled trained dual distance against empirical
quantiles of the multiplier bootstrap. The two-sample critical value
combines the per-sample bootstrap quantiles across a grid of level
splits and takes the smallest combination, which makes that test
conservative by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bootstrap import BootstrapDraws, empirical_quantile, run_bootstrap
from .datagen import DistSpec, generate
from .dual import train_dual_critic
from .errors import DimensionError, InputError
from .exact import DEFAULT_COST_BUDGET, wasserstein1_1d_exact, wasserstein1_lp_exact
from .nn import TrainConfig, parameter_count
from .samples import Sample
from .seeds import derive_seed

DEFAULT_SPLIT_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))


@dataclass(frozen=True)
class TestReport:
    """Decision record for one test run.

    ``statistic`` is exactly ``scaling * raw_distance`` and the decision
    is Reject iff statistic >= quantile. ``parameter_counts`` holds the
    critic size S (one entry for one-sample runs, two for two-sample).
    ``p_value`` is the fraction of bootstrap draws at or above the
    statistic; it is a diagnostic, not part of the decision rule.
    """

    statistic: float
    raw_distance: float
    scaling: float
    quantile: float
    alpha: float
    decision: str
    n: int
    m: int
    parameter_counts: tuple[int, ...]
    T: int
    seed: int
    config_digest: str
    p_value: float

    def __post_init__(self):
        if self.statistic != self.scaling * self.raw_distance:
            raise InputError("statistic must equal scaling * raw_distance exactly")
        expected = "Reject" if self.statistic >= self.quantile else "Accept"
        if self.decision != expected:
            raise InputError(f"decision {self.decision!r} contradicts the rule")

    def to_json_dict(self) -> dict:
        s = self.parameter_counts
        return {
            "statistic": self.statistic,
            "raw_distance": self.raw_distance,
            "scaling": self.scaling,
            "quantile": self.quantile,
            "alpha": self.alpha,
            "decision": self.decision,
            "n": self.n,
            "m": self.m,
            "S": s[0] if len(s) == 1 else list(s),
            "T": self.T,
            "seed": self.seed,
            "config_digest": self.config_digest,
            "p_value": self.p_value,
        }


@dataclass(frozen=True)
class TwoSampleQuantile:
    """Critical value of the two-sample test: the minimum over the split
    grid of the sum of per-sample scaled bootstrap quantiles."""

    split_grid: tuple[float, ...]
    per_split_values: tuple[float, ...]
    critical_value: float
    balance: float          # m / (n + m)
    effective_size: float   # n m / (n + m)

    def __post_init__(self):
        if not (0.0 < self.balance < 1.0):
            raise InputError(f"balance {self.balance} outside (0, 1)")
        if self.critical_value != min(self.per_split_values):
            raise InputError("critical_value must be the grid minimum")

    def to_json_dict(self) -> dict:
        return {
            "split_grid": list(self.split_grid),
            "per_split_values": list(self.per_split_values),
            "critical_value": self.critical_value,
            "balance": self.balance,
            "effective_size": self.effective_size,
        }


def _size_arithmetic(n: int, m: int) -> tuple[float, float]:
    """Effective size and balance with their defining identities asserted."""
    rho = n * m / (n + m)
    lam = m / (n + m)
    assert abs(rho * (1.0 / n + 1.0 / m) - 1.0) < 1e-12
    assert lam + n / (n + m) == 1.0 or abs(lam + n / (n + m) - 1.0) < 1e-15
    return rho, lam


def one_sample_test(
    x: Sample,
    ref: Sample,
    alpha: float,
    cfg: TrainConfig | None = None,
    T: int = 300,
    seed: int = 0,
    threads: int = 1,
) -> TestReport:
    """Test whether x was drawn from the measure the reference sample
    represents. ``ref`` stands in for the null measure; sizes >= 10 * n
    keep its own sampling error secondary.

    The statistic sqrt(n / S) * trained distance is compared with the
    (1 - alpha) bootstrap quantile computed from x alone.
    """
    if x.d != ref.d:
        raise DimensionError(f"dimension mismatch: {x.d} vs {ref.d}")
    if not (0.0 < alpha < 1.0):
        raise InputError(f"alpha must be in (0, 1), got {alpha}")
    if cfg is None:
        cfg = TrainConfig()
    estimate = train_dual_critic(x, ref, cfg.with_seed(derive_seed(seed, 1)))
    raw = estimate.value
    S = estimate.net.parameter_count
    scaling = math.sqrt(x.n / S)
    statistic = scaling * raw
    draws = run_bootstrap(x, T, cfg, seed=derive_seed(seed, 2), threads=threads)
    quantile = empirical_quantile(draws, 1.0 - alpha)
    return TestReport(
        statistic=statistic,
        raw_distance=raw,
        scaling=scaling,
        quantile=quantile,
        alpha=alpha,
        decision="Reject" if statistic >= quantile else "Accept",
        n=x.n,
        m=ref.n,
        parameter_counts=(S,),
        T=T,
        seed=int(seed),
        config_digest=cfg.digest(),
        p_value=float(np.mean(draws.draws >= statistic)),
    )


def confidence_interval(
    x: Sample,
    ref: Sample,
    alpha: float,
    cfg: TrainConfig | None = None,
    T: int = 300,
    seed: int = 0,
    threads: int = 1,
) -> tuple[float, float]:
    """Bootstrap interval [sqrt(S/n) q(alpha/2), sqrt(S/n) q(1 - alpha/2)]
    for the distance between the sampled measure and the reference,
    endpoints sorted ascending and the lower end clamped at 0."""
    if x.d != ref.d:
        raise DimensionError(f"dimension mismatch: {x.d} vs {ref.d}")
    if not (0.0 < alpha < 1.0):
        raise InputError(f"alpha must be in (0, 1), got {alpha}")
    if cfg is None:
        cfg = TrainConfig()
    S = parameter_count(x.d, cfg.hidden_widths)
    draws = run_bootstrap(x, T, cfg, seed=derive_seed(seed, 2), threads=threads)
    factor = math.sqrt(S / x.n)
    lo = factor * empirical_quantile(draws, alpha / 2.0)
    hi = factor * empirical_quantile(draws, 1.0 - alpha / 2.0)
    lo, hi = min(lo, hi), max(lo, hi)
    return max(lo, 0.0), hi


def two_sample_test(
    x: Sample,
    y: Sample,
    alpha: float,
    cfg_x: TrainConfig | None = None,
    cfg_y: TrainConfig | None = None,
    T: int = 300,
    seed: int = 0,
    split_grid: tuple[float, ...] = DEFAULT_SPLIT_GRID,
    threads: int = 1,
) -> tuple[TestReport, TwoSampleQuantile]:
    """Test whether two samples share a law.

    The statistic sqrt(rho / min(S_x, S_y)) * trained distance is compared
    with the split-grid critical value built from one bootstrap per sample.
    The dual critic uses the smaller-S config (the one the scaling refers to).
    """
    if x.d != y.d:
        raise DimensionError(f"dimension mismatch: {x.d} vs {y.d}")
    if not (0.0 < alpha < 1.0):
        raise InputError(f"alpha must be in (0, 1), got {alpha}")
    split_grid = tuple(float(r) for r in split_grid)
    if not split_grid or not all(0.0 < r < 1.0 for r in split_grid):
        raise InputError("split_grid must be a non-empty subset of (0, 1)")
    cfg_x = cfg_x if cfg_x is not None else TrainConfig()
    cfg_y = cfg_y if cfg_y is not None else cfg_x
    s_x = parameter_count(x.d, cfg_x.hidden_widths)
    s_y = parameter_count(y.d, cfg_y.hidden_widths)
    dual_cfg = cfg_x if s_x <= s_y else cfg_y
    estimate = train_dual_critic(x, y, dual_cfg.with_seed(derive_seed(seed, 1)))
    raw = estimate.value
    rho, lam = _size_arithmetic(x.n, y.n)
    scaling = math.sqrt(rho / min(s_x, s_y))
    statistic = scaling * raw
    draws_x = run_bootstrap(x, T, cfg_x, seed=derive_seed(seed, 2), threads=threads)
    draws_y = run_bootstrap(y, T, cfg_y, seed=derive_seed(seed, 3), threads=threads)
    per_split = tuple(
        math.sqrt(lam) * empirical_quantile(draws_x, 1.0 - r * alpha)
        + math.sqrt(1.0 - lam) * empirical_quantile(draws_y, 1.0 - (1.0 - r) * alpha)
        for r in split_grid
    )
    quantile_info = TwoSampleQuantile(
        split_grid=split_grid,
        per_split_values=per_split,
        critical_value=min(per_split),
        balance=lam,
        effective_size=rho,
    )
    combined = np.sort(
        np.concatenate(
            [math.sqrt(lam) * draws_x.draws, math.sqrt(1.0 - lam) * draws_y.draws]
        )
    )
    report = TestReport(
        statistic=statistic,
        raw_distance=raw,
        scaling=scaling,
        quantile=quantile_info.critical_value,
        alpha=alpha,
        decision="Reject" if statistic >= quantile_info.critical_value else "Accept",
        n=x.n,
        m=y.n,
        parameter_counts=(s_x, s_y),
        T=T,
        seed=int(seed),
        config_digest=dual_cfg.digest(),
        p_value=float(np.mean(combined >= statistic)),
    )
    return report, quantile_info


@dataclass(frozen=True)
class BudgetReport:
    admissible: bool
    lower: float
    upper: float


def check_parameter_budget(n: int, d: int, S: int) -> BudgetReport:
    """Advisory window n^(2d/(3+2d)) (ln n)^(1/3) < S < n / (ln n)^6 with
    unit constants. The window can be empty at practical n, so this warns
    rather than gates."""
    if n < 3:
        raise InputError(f"n must be >= 3, got {n}")
    if d < 1:
        raise InputError(f"d must be >= 1, got {d}")
    log_n = math.log(n)
    lower = n ** (2.0 * d / (3.0 + 2.0 * d)) * log_n ** (1.0 / 3.0)
    upper = n / log_n**6
    return BudgetReport(admissible=bool(lower < S < upper), lower=lower, upper=upper)


@dataclass(frozen=True)
class AntiConcentrationTable:
    """C estimates over an (r, delta) grid: the empirical frequency of
    distance draws in [r, r + delta], divided by delta."""

    r_grid: np.ndarray
    deltas: tuple[float, ...]
    estimates: np.ndarray  # shape (len(deltas), len(r_grid))
    distances: np.ndarray  # the simulated distance draws

    def rows(self):
        for i, delta in enumerate(self.deltas):
            for j, r in enumerate(self.r_grid):
                yield float(r), float(delta), float(self.estimates[i, j])


def _exact_distance(x: Sample, y: Sample, lp_budget: int) -> float:
    if x.d == 1:
        return wasserstein1_1d_exact(x, y)
    return wasserstein1_lp_exact(x, y, max_cost_entries=lp_budget)


def anti_concentration_diagnostic(
    spec: DistSpec,
    n: int,
    reps: int,
    m_ref: int | None = None,
    deltas: tuple[float, ...] = (0.02, 0.04, 0.06, 0.08, 0.10),
    seed: int = 0,
    r_grid: np.ndarray | None = None,
    lp_budget: int = DEFAULT_COST_BUDGET,
) -> AntiConcentrationTable:
    """Estimate how much mass the distance distribution puts on short
    intervals.

    Each repetition draws a fresh size-n sample and a fresh size-m_ref
    reference (approximating the population), computes their exact
    distance, and the table reports interval frequencies divided by the
    interval length. Bounded values across the grid support the
    anti-concentration assumption behind the quantile-based tests.
    """
    if reps < 50:
        raise InputError(f"reps must be >= 50, got {reps}")
    deltas = tuple(float(v) for v in deltas)
    if not deltas or not all(0.0 < v < 1.0 for v in deltas):
        raise InputError("deltas must be a non-empty subset of (0, 1)")
    if m_ref is None:
        m_ref = 10 * n
    distances = np.empty(reps)
    for i in range(reps):
        data = generate(spec, n, derive_seed(seed, i, 0))
        reference = generate(spec, m_ref, derive_seed(seed, i, 1))
        distances[i] = _exact_distance(data, reference, lp_budget)
    if r_grid is None:
        r_grid = np.linspace(0.0, float(distances.max()), 50)
    r_grid = np.asarray(r_grid, dtype=np.float64)
    estimates = np.empty((len(deltas), r_grid.size))
    for i, delta in enumerate(deltas):
        for j, r in enumerate(r_grid):
            hits = np.mean((distances >= r) & (distances <= r + delta))
            estimates[i, j] = hits / delta
    return AntiConcentrationTable(
        r_grid=r_grid, deltas=deltas, estimates=estimates, distances=distances
    )


def qq_reference(
    spec: DistSpec,
    n: int,
    reps: int,
    seed: int = 0,
    cfg: TrainConfig | None = None,
    lp_budget: int = DEFAULT_COST_BUDGET,
) -> np.ndarray:
    """Reference distribution for Q-Q validation of the bootstrap.

    Each repetition draws two fresh size-n samples, computes their
    distance (exact transport when the instance fits the solver budget,
    the trained dual otherwise) and scales it by sqrt(n / S), with S
    taken from ``cfg`` so the values are comparable with bootstrap draws
    produced under the same config.
    """
    if reps < 2:
        raise InputError(f"reps must be >= 2, got {reps}")
    if cfg is None:
        cfg = TrainConfig()
    S = parameter_count(spec.d, cfg.hidden_widths)
    factor = math.sqrt(n / S)
    use_exact = n * n <= lp_budget
    values = np.empty(reps)
    for i in range(reps):
        a = generate(spec, n, derive_seed(seed, i, 0))
        b = generate(spec, n, derive_seed(seed, i, 1))
        if use_exact:
            dist = _exact_distance(a, b, lp_budget)
        else:
            dist = train_dual_critic(a, b, cfg.with_seed(derive_seed(seed, i, 2))).value
        values[i] = factor * dist
    return values
