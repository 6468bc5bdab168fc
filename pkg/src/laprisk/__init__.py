"""Risk-aware calibration toolkit for the Laplace mechanism.

Quantifies the probability that a mechanism calibrated at one privacy
level also satisfies a stronger one, plans the sensitivity-sampling
experiments behind data-dependent calibrations, composes guarantees
across repeated releases, and sizes GDPR-style compensation budgets
against the chosen level.
"""

from .composition import (
    ComparisonRow,
    CompositionLedger,
    advanced_composition,
    basic_composition,
    compare,
    par_composition,
)
from .cost import (
    CostModelParams,
    EpsilonBounds,
    budget,
    dp_cost,
    epsilon_bounds,
    epsilon_min,
    epsilon_min_scalar,
    par_cost,
)
from .exceptions import (
    InfeasibleBudgetError,
    InsufficientSamplesError,
    NoRootError,
    QuadratureError,
)
from .loss import LossDistribution
from .mechanism import (
    LaplaceMechanism,
    expected_mae,
    laplace_sample,
    overlap,
    rmse_experiment,
    rmse_runs,
    synthetic_regression_source,
)
from .oracle import (
    McConfig,
    McEstimate,
    gamma_sampler,
    simulate_confidence,
    simulate_mechanism_loss,
    simulate_sensitivity_coverage,
    validate_confidence,
)
from .risk import (
    RiskAssessment,
    calibrate_noise_level,
    calibrate_noise_level_coupled,
    convex_mixture,
    coupled_confidence,
    dkw_adjusted_confidence,
    explicit_confidence,
    explicit_confidence_scalar,
    level_for_confidence,
    probabilistic_dp_delta,
    probabilistic_tolerance,
    sample_size_for,
)
from .sensitivity import (
    DataSource,
    EmpiricalCdf,
    QuerySpec,
    empirical_cdf,
    eta_estimate,
    normalize,
    query_eval,
    sample_neighbour_pair,
    sampled_sensitivity,
    sensitivity_samples,
)
from .special import QuadratureConfig, bessel_k_half, integrate, log_gamma

__version__ = "0.1.0"

__all__ = [
    "ComparisonRow",
    "CompositionLedger",
    "CostModelParams",
    "DataSource",
    "EmpiricalCdf",
    "EpsilonBounds",
    "InfeasibleBudgetError",
    "InsufficientSamplesError",
    "LaplaceMechanism",
    "LossDistribution",
    "McConfig",
    "McEstimate",
    "NoRootError",
    "QuadratureConfig",
    "QuadratureError",
    "QuerySpec",
    "RiskAssessment",
    "advanced_composition",
    "basic_composition",
    "bessel_k_half",
    "budget",
    "calibrate_noise_level",
    "calibrate_noise_level_coupled",
    "compare",
    "convex_mixture",
    "coupled_confidence",
    "dkw_adjusted_confidence",
    "dp_cost",
    "empirical_cdf",
    "epsilon_bounds",
    "epsilon_min",
    "epsilon_min_scalar",
    "eta_estimate",
    "expected_mae",
    "explicit_confidence",
    "explicit_confidence_scalar",
    "gamma_sampler",
    "integrate",
    "laplace_sample",
    "level_for_confidence",
    "log_gamma",
    "normalize",
    "overlap",
    "par_composition",
    "par_cost",
    "probabilistic_dp_delta",
    "probabilistic_tolerance",
    "query_eval",
    "rmse_experiment",
    "rmse_runs",
    "sample_neighbour_pair",
    "sample_size_for",
    "sampled_sensitivity",
    "sensitivity_samples",
    "simulate_confidence",
    "simulate_mechanism_loss",
    "simulate_sensitivity_coverage",
    "synthetic_regression_source",
    "validate_confidence",
]
