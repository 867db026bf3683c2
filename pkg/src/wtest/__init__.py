"""Wasserstein goodness-of-fit testing with neural dual critics.

The package estimates the 1-Wasserstein distance by training a
spectral-normalized ReLU critic on the dual objective, approximates the
sampling distribution of the scaled empirical distance with a Gaussian
multiplier bootstrap, and runs calibrated one-sample and two-sample
tests. Exact transport solvers serve as validation oracles, and an MMD
permutation test is included as a baseline.
"""

from .bootstrap import BootstrapDraws, bootstrap_draw, empirical_quantile, run_bootstrap
from .datagen import DistSpec, generate, natural_box, rescale_to_unit_box
from .dual import DualEstimate, evaluate_dual, train_dual_critic
from .errors import (
    CapacityError,
    ConfigurationError,
    DimensionError,
    InputError,
    NumericError,
    WtestError,
)
from .exact import wasserstein1_1d_exact, wasserstein1_lp_exact
from .inference import (
    AntiConcentrationTable,
    BudgetReport,
    TestReport,
    TwoSampleQuantile,
    anti_concentration_diagnostic,
    check_parameter_budget,
    confidence_interval,
    one_sample_test,
    qq_reference,
    two_sample_test,
)
from .mmd import MmdReport, mmd2_unbiased, mmd_permutation_test, median_heuristic_bandwidth
from .nn import (
    CriticNet,
    LayerParams,
    TrainConfig,
    batch_forward,
    batch_gradient,
    forward,
    init_critic,
    lipschitz_upper_bound,
    optimizer_step,
    parameter_count,
    spectral_normalize,
)
from .samples import Sample, load_csv

__version__ = "0.1.0"

__all__ = [
    "AntiConcentrationTable",
    "BootstrapDraws",
    "BudgetReport",
    "CapacityError",
    "ConfigurationError",
    "CriticNet",
    "DimensionError",
    "DistSpec",
    "DualEstimate",
    "InputError",
    "LayerParams",
    "MmdReport",
    "NumericError",
    "Sample",
    "TestReport",
    "TrainConfig",
    "TwoSampleQuantile",
    "WtestError",
    "anti_concentration_diagnostic",
    "batch_forward",
    "batch_gradient",
    "bootstrap_draw",
    "check_parameter_budget",
    "confidence_interval",
    "empirical_quantile",
    "evaluate_dual",
    "forward",
    "generate",
    "init_critic",
    "lipschitz_upper_bound",
    "load_csv",
    "median_heuristic_bandwidth",
    "mmd2_unbiased",
    "mmd_permutation_test",
    "natural_box",
    "one_sample_test",
    "optimizer_step",
    "parameter_count",
    "qq_reference",
    "rescale_to_unit_box",
    "run_bootstrap",
    "spectral_normalize",
    "train_dual_critic",
    "two_sample_test",
    "wasserstein1_1d_exact",
    "wasserstein1_lp_exact",
    "__version__",
]
