"""Compensation budgeting for privacy-preserving releases.

A data controller liable for per-person compensation in the event of a
breach can discount that liability by the strength of the privacy
guarantee.  The per-person cost curve used here,

    dp_cost(eps) = floor + full * exp(-rate / eps),

is bounded by floor + full, increases with the privacy level, and tends to
the floor as eps -> 0.  Under a probabilistic guarantee the controller
pays the strong-level cost with the confidence of meeting it and the
calibrated-level cost otherwise; that mixture is convex in eps, so a
unique budget-minimising level exists and is found by golden-section
search.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InfeasibleBudgetError
from .risk import explicit_confidence
from .solvers import find_root, golden_section_min

__all__ = [
    "CostModelParams",
    "dp_cost",
    "par_cost",
    "budget",
    "epsilon_min",
    "epsilon_min_scalar",
    "EpsilonBounds",
    "epsilon_bounds",
    "write_budget_curve_csv",
]


@dataclass(frozen=True)
class CostModelParams:
    """Parameters of the per-person compensation curve.

    ``full_compensation`` is the payout with no privacy guarantee at all,
    ``floor_compensation`` the irreducible payout however strong the
    guarantee, ``rate`` controls how fast cost rises with the privacy
    level, and ``population`` scales per-person cost to a total budget.
    """

    full_compensation: float
    floor_compensation: float = 0.0
    rate: float = 1.0
    population: int = 1

    def __post_init__(self):
        if not self.floor_compensation >= 0:
            raise ValueError("floor_compensation must be non-negative")
        if not self.full_compensation > self.floor_compensation:
            raise ValueError("full_compensation must exceed floor_compensation")
        if not self.rate > 0:
            raise ValueError("rate must be positive")
        if self.population < 1:
            raise ValueError("population must be at least 1")


def dp_cost(eps: float, params: CostModelParams) -> float:
    """Per-person compensation under a plain guarantee at level eps."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    return params.floor_compensation + params.full_compensation * math.exp(-params.rate / eps)


def par_cost(eps: float, eps0: float, params: CostModelParams, k: int = 1,
             confidence=None) -> float:
    """Per-person compensation under a probabilistic guarantee.

    Mixes the strong-level and calibrated-level costs with the confidence
    of meeting the strong level.  By default the confidence is the
    noise-randomness value for a k-dimensional query; pass a callable
    ``confidence(eps) -> gamma`` to substitute an estimated coupling.
    """
    if not eps0 > 0:
        raise ValueError(f"eps0 must be positive, got {eps0!r}")
    if not 0.0 < eps <= eps0:
        raise ValueError(f"eps must lie in (0, eps0], got {eps!r}")
    gamma = confidence(eps) if confidence is not None else explicit_confidence(eps, eps0, k)
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"confidence produced {gamma!r}, outside [0, 1]")
    return gamma * dp_cost(eps, params) + (1.0 - gamma) * dp_cost(eps0, params)


def budget(eps: float, eps0: float, params: CostModelParams, k: int = 1,
           confidence=None) -> float:
    """Total compensation budget over the population."""
    return params.population * par_cost(eps, eps0, params, k, confidence)


def epsilon_min(eps0: float, params: CostModelParams, k: int = 1, confidence=None) -> float:
    """Privacy level in (0, eps0] minimising the probabilistic budget.

    Golden-section search on the convex per-person cost, to interval width
    1e-6; returns eps0 itself when the boundary is no worse than the
    interior candidate.
    """
    if not eps0 > 0:
        raise ValueError(f"eps0 must be positive, got {eps0!r}")

    def objective(eps):
        return par_cost(eps, eps0, params, k, confidence)

    interior = golden_section_min(objective, eps0 * 1e-9, eps0, x_tol=1e-6)
    if objective(eps0) <= objective(interior):
        return eps0
    return interior


def epsilon_min_scalar(eps0: float) -> float:
    """Stationarity-equation route to the optimal level for the simplified model.

    Valid for the scalar-query closed-form confidence with unit rate and
    zero floor, where the budget minimiser solves

        1/eps - ln(1 + (exp(eps) - 1) / eps^2) = 1/eps0.

    Solved by bracketed Newton; used to cross-check :func:`epsilon_min`.
    """
    if not eps0 > 0:
        raise ValueError(f"eps0 must be positive, got {eps0!r}")

    def f(eps):
        return 1.0 / eps - math.log1p(math.expm1(eps) / (eps * eps)) - 1.0 / eps0

    def fprime(eps):
        u = math.expm1(eps) / (eps * eps)
        du = math.exp(eps) / (eps * eps) - 2.0 * math.expm1(eps) / (eps**3)
        return -1.0 / (eps * eps) - du / (1.0 + u)

    return find_root(f, 1e-8, eps0, f_tol=1e-12, derivative=fprime)


@dataclass(frozen=True)
class EpsilonBounds:
    """Admissible privacy-level window under error and budget constraints.

    ``upper`` is ``math.inf`` when the budget covers even the weakest
    guarantee.  An empty window (lower above upper) is reported through
    ``feasible`` rather than an exception so callers can inspect both ends.
    """

    lower: float
    upper: float

    @property
    def feasible(self) -> bool:
        return self.lower <= self.upper


def epsilon_bounds(max_expected_error: float, budget_per_person: float, gamma: float,
                   eps0: float, params: CostModelParams) -> EpsilonBounds:
    """Privacy-level window meeting an error ceiling and a budget cap.

    The utility requirement (expected absolute error of a unit-sensitivity
    release at most ``max_expected_error``) forces eps >= 1/max_expected_error.
    Inverting the mixed cost at fixed confidence ``gamma`` caps eps from
    above.  Raises InfeasibleBudgetError when the budget cannot even cover
    the cost floor of the mixture; a budget beyond the full-compensation
    regime leaves the upper end unbounded.
    """
    if not max_expected_error > 0:
        raise ValueError(f"max_expected_error must be positive, got {max_expected_error!r}")
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma!r}")
    lower = 1.0 / max_expected_error
    floor = gamma * params.floor_compensation + (1.0 - gamma) * dp_cost(eps0, params)
    headroom = budget_per_person - floor
    if headroom <= 0:
        raise InfeasibleBudgetError(
            f"budget {budget_per_person!r} per person cannot cover the cost floor "
            f"{floor:.6g} of a confidence-{gamma!r} guarantee at eps0={eps0!r}"
        )
    ratio = gamma * params.full_compensation / headroom
    upper = math.inf if ratio <= 1.0 else params.rate / math.log(ratio)
    return EpsilonBounds(lower=lower, upper=upper)


def write_budget_curve_csv(path_or_handle, eps_values, budgets) -> None:
    """Write an (eps, budget) curve for external plotting."""
    handle = path_or_handle if hasattr(path_or_handle, "write") else open(
        path_or_handle, "w", newline="")
    owned = handle is not path_or_handle
    try:
        handle.write("eps,budget\n")
        for eps, value in zip(np.asarray(eps_values, float), np.asarray(budgets, float)):
            handle.write(f"{float(eps)!r},{float(value)!r}\n")
    finally:
        if owned:
            handle.close()
