"""Probabilistic privacy guarantees for calibrated Laplace mechanisms.

A mechanism calibrated at noise level ``eps0`` satisfies any weaker level
with certainty.  This module quantifies how often it also satisfies a
*stronger* level ``eps < eps0``, as a confidence in [0, 1], under three
sources of randomness:

* explicit: the Laplace noise itself (confidence from the truncated loss
  distribution ratio);
* implicit: sampling of the data, where the sensitivity is estimated from
  an empirical distribution and the confidence carries a
  Dvoretzky-Kiefer-Wolfowitz estimation penalty;
* coupled: both at once, with the truncation point rescaled by the ratio
  of true to sampled sensitivity.

Throughout, ``gamma`` denotes the confidence of *satisfying* the stronger
level; the complementary violation probability is exposed as
``RiskAssessment.violation_risk``.
"""

import math
from dataclasses import dataclass

from .exceptions import NoRootError
from .loss import LossDistribution
from .solvers import find_root

__all__ = [
    "RiskAssessment",
    "explicit_confidence",
    "explicit_confidence_scalar",
    "level_for_confidence",
    "probabilistic_tolerance",
    "sample_size_for",
    "dkw_adjusted_confidence",
    "coupled_confidence",
    "calibrate_noise_level",
    "calibrate_noise_level_coupled",
    "probabilistic_dp_delta",
    "convex_mixture",
]

_CASES = ("explicit", "implicit", "coupled")


@dataclass(frozen=True)
class RiskAssessment:
    """A (privacy level, confidence) statement with its estimation metadata.

    ``epsilon`` is the privacy level the mechanism meets with probability
    ``confidence``.  For the implicit and coupled cases the assessment
    additionally records the estimation accuracy and sample count behind
    the sensitivity estimate; the coupled case also records the ratio of
    true to sampled sensitivity.  ``epsilon`` may be omitted only for an
    implicit-case assessment used as a sampling plan, before a level has
    been chosen.
    """

    epsilon: float | None
    confidence: float
    case: str
    accuracy: float | None = None
    n_samples: int | None = None
    sensitivity_ratio: float | None = None

    def __post_init__(self):
        if self.case not in _CASES:
            raise ValueError(f"case must be one of {_CASES}, got {self.case!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must lie in [0, 1], got {self.confidence!r}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if self.epsilon is None and self.case != "implicit":
            raise ValueError("epsilon may be omitted only for implicit-case assessments")
        estimated = self.case in ("implicit", "coupled")
        if estimated and (self.accuracy is None or self.n_samples is None):
            raise ValueError(f"{self.case} assessments require accuracy and n_samples")
        if not estimated and (self.accuracy is not None or self.n_samples is not None):
            raise ValueError("explicit assessments carry no estimation metadata")
        if (self.sensitivity_ratio is not None) != (self.case == "coupled"):
            raise ValueError("sensitivity_ratio is present exactly for coupled assessments")
        if self.sensitivity_ratio is not None and not self.sensitivity_ratio > 0:
            raise ValueError("sensitivity_ratio must be positive")

    @property
    def violation_risk(self) -> float:
        return 1.0 - self.confidence

    def to_dict(self) -> dict:
        out = {"eps": self.epsilon, "gamma": self.confidence, "case": self.case}
        if self.accuracy is not None:
            out["rho"] = self.accuracy
            out["n"] = self.n_samples
        if self.sensitivity_ratio is not None:
            out["eta"] = self.sensitivity_ratio
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RiskAssessment":
        return cls(
            epsilon=data.get("eps"),
            confidence=data["gamma"],
            case=data["case"],
            accuracy=data.get("rho"),
            n_samples=data.get("n"),
            sensitivity_ratio=data.get("eta"),
        )


def explicit_confidence(eps: float, eps0: float, k: int) -> float:
    """Confidence that an eps0-calibrated mechanism meets level eps, from noise alone.

    Clamps to 1 for eps >= eps0: a mechanism meeting a level surely meets
    every weaker one.
    """
    if not eps0 > 0:
        raise ValueError(f"eps0 must be positive, got {eps0!r}")
    if math.isnan(eps) or eps < 0:
        raise ValueError(f"eps must be non-negative, got {eps!r}")
    return LossDistribution(k).truncated_ratio(eps, eps0)


def explicit_confidence_scalar(eps: float, eps0: float) -> float:
    """Closed form of :func:`explicit_confidence` for one-dimensional queries.

    The loss distribution is then a unit exponential, so the ratio is
    (1 - exp(-eps)) / (1 - exp(-eps0)).
    """
    if not eps0 > 0:
        raise ValueError(f"eps0 must be positive, got {eps0!r}")
    if math.isnan(eps) or eps < 0:
        raise ValueError(f"eps must be non-negative, got {eps!r}")
    if eps >= eps0:
        return 1.0
    return -math.expm1(-eps) / -math.expm1(-eps0)


def level_for_confidence(confidence: float, eps0: float, k: int) -> float:
    """Privacy level met with the requested confidence; inverse of explicit_confidence.

    Returns a value in (0, eps0].  Inversion is numeric for k > 1; the
    scalar case could use the closed form but the same bracketed solver
    keeps all dimensions on one code path.
    """
    if not 0.0 < confidence <= 1.0:
        raise ValueError(f"confidence must lie in (0, 1], got {confidence!r}")
    if not eps0 > 0:
        raise ValueError(f"eps0 must be positive, got {eps0!r}")
    if confidence == 1.0:
        return eps0
    dist = LossDistribution(k)
    target = confidence * dist.cdf(eps0)
    return find_root(
        lambda e: dist.cdf(e) - target,
        0.0,
        eps0,
        f_tol=1e-10 * max(target, 1e-6),
        derivative=dist.pdf,
    )


def probabilistic_tolerance(accuracy: float, n_samples: int) -> float:
    """Probability bound 1 - 2*exp(-2 * accuracy^2 * n) that an empirical CDF of
    n samples stays uniformly within ``accuracy`` of the true CDF.

    May be negative for small n, in which case the bound is vacuous and
    callers should treat it as zero.
    """
    if not 0.0 < accuracy < 1.0:
        raise ValueError(f"accuracy must lie in (0, 1), got {accuracy!r}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be at least 1, got {n_samples!r}")
    return 1.0 - 2.0 * math.exp(-2.0 * accuracy * accuracy * n_samples)


def sample_size_for(accuracy: float, tolerance: float) -> int:
    """Smallest sample count whose probabilistic tolerance reaches ``tolerance``."""
    if not 0.0 < accuracy < 1.0:
        raise ValueError(f"accuracy must lie in (0, 1), got {accuracy!r}")
    if not 0.0 < tolerance < 1.0:
        raise ValueError(f"tolerance must lie in (0, 1), got {tolerance!r}")
    raw = math.log(2.0 / (1.0 - tolerance)) / (2.0 * accuracy * accuracy)
    if raw > 2**62:
        raise OverflowError(f"required sample count {raw:.3e} is not representable")
    return max(1, math.ceil(raw))


def dkw_adjusted_confidence(confidence: float, accuracy: float, n_samples: int) -> float:
    """Lower bound on a confidence estimated from n sensitivity samples.

    Discounts the stated confidence by the probability that the empirical
    sensitivity CDF strayed more than ``accuracy`` from the truth.  The same
    discount applies whether the stated confidence comes from the implicit
    case or the coupled case.  A vacuous (negative) tolerance clamps to 0.
    """
    if not 0.0 <= confidence <= 1.0:
        raise ValueError(f"confidence must lie in [0, 1], got {confidence!r}")
    return confidence * max(0.0, probabilistic_tolerance(accuracy, n_samples))


def coupled_confidence(eps: float, eps0: float, k: int, sensitivity_ratio: float,
                       data_confidence: float) -> float:
    """Confidence under both noise and data-sampling randomness.

    The truncation point of the loss distribution moves to
    ``sensitivity_ratio * eps0`` because the mechanism was calibrated with
    the sampled sensitivity rather than the true one; the result is the
    rescaled noise confidence multiplied by the data-sampling confidence.
    """
    if not sensitivity_ratio > 0:
        raise ValueError(f"sensitivity_ratio must be positive, got {sensitivity_ratio!r}")
    if not 0.0 <= data_confidence <= 1.0:
        raise ValueError(f"data_confidence must lie in [0, 1], got {data_confidence!r}")
    if not eps0 > 0:
        raise ValueError(f"eps0 must be positive, got {eps0!r}")
    ratio = LossDistribution(k).truncated_ratio(eps, sensitivity_ratio * eps0)
    return min(1.0, max(0.0, ratio * data_confidence))


def calibrate_noise_level(eps: float, confidence: float, k: int) -> float:
    """Noise level eps0 >= eps at which level eps holds with the given confidence.

    Solves ``confidence * P(T <= eps0) - P(T <= eps) = 0`` by bracketed
    bisection with Newton polish.  No root exists when the confidence is
    below P(T <= eps), the limiting ratio as eps0 grows without bound.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if not 0.0 < confidence <= 1.0:
        raise ValueError(f"confidence must lie in (0, 1], got {confidence!r}")
    dist = LossDistribution(k)
    numerator = dist.cdf(eps)
    if confidence <= numerator:
        raise NoRootError(
            f"confidence {confidence!r} is not achievable: even an arbitrarily weak "
            f"calibration meets level {eps!r} with probability {numerator:.6g}"
        )
    if confidence == 1.0:
        return eps

    def residual(e0):
        return confidence * dist.cdf(e0) - numerator

    hi = max(2.0 * eps, 1.0)
    while residual(hi) < 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise NoRootError("no finite calibration level reaches the target confidence")
    return find_root(residual, eps, hi, f_tol=1e-9)


def calibrate_noise_level_coupled(eps: float, target_bound: float, data_confidence: float,
                                  tolerance: float, sensitivity_ratio: float, k: int) -> float:
    """Noise level for the coupled case, from a target on the estimated confidence.

    Solves ``target_bound * P(T <= ratio*eps0) - tolerance * data_confidence
    * P(T <= eps) = 0`` for eps0 on [eps/ratio, inf).  Requires
    ``target_bound <= tolerance * data_confidence`` for a root to exist in
    that range, and the target to exceed its limiting value at infinity.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if not 0.0 < target_bound <= 1.0:
        raise ValueError(f"target_bound must lie in (0, 1], got {target_bound!r}")
    if not 0.0 < data_confidence <= 1.0:
        raise ValueError(f"data_confidence must lie in (0, 1], got {data_confidence!r}")
    if not 0.0 < tolerance <= 1.0:
        raise ValueError(f"tolerance must lie in (0, 1], got {tolerance!r}")
    if not sensitivity_ratio > 0:
        raise ValueError(f"sensitivity_ratio must be positive, got {sensitivity_ratio!r}")
    dist = LossDistribution(k)
    rhs = tolerance * data_confidence * dist.cdf(eps)
    if target_bound > tolerance * data_confidence:
        raise NoRootError(
            "target exceeds tolerance * data_confidence; no calibration at or above "
            "the requested level can reach it"
        )
    if target_bound <= rhs:
        raise NoRootError(
            f"target {target_bound!r} is at or below its limiting value {rhs:.6g}; "
            "no finite calibration level reaches it"
        )

    def residual(e0):
        return target_bound * dist.cdf(sensitivity_ratio * e0) - rhs

    lo = eps / sensitivity_ratio
    hi = max(2.0 * lo, 1.0)
    while residual(hi) < 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise NoRootError("no finite calibration level reaches the target confidence")
    return find_root(residual, lo, hi, f_tol=1e-9)


def probabilistic_dp_delta(eps: float, eps0: float, k: int) -> float:
    """Slack delta with which the calibrated mechanism is (eps, delta)-probabilistically
    differentially private: the violation probability for eps <= eps0, zero above."""
    if not eps0 > 0:
        raise ValueError(f"eps0 must be positive, got {eps0!r}")
    if eps > eps0:
        return 0.0
    return 1.0 - explicit_confidence(eps, eps0, k)


def convex_mixture(eps1: float, confidence1: float, eps2: float, confidence2: float,
                   weight: float) -> tuple[float, float]:
    """Level and confidence of a mechanism that randomly mixes two assessed ones.

    For a mechanism running the first assessed mechanism with probability
    ``weight`` and the second otherwise, the mixture satisfies the
    confidence-weighted average level

        eps' = (w*g1*eps1 + (1-w)*g2*eps2) / (w*g1 + (1-w)*g2)

    with parameter gamma' = 1 - w*g1 - (1-w)*g2.
    """
    if not 0.0 <= weight <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {weight!r}")
    mass = weight * confidence1 + (1.0 - weight) * confidence2
    if mass <= 0.0:
        raise ValueError("mixture is degenerate: both confidences are zero")
    mixed_eps = (weight * confidence1 * eps1 + (1.0 - weight) * confidence2 * eps2) / mass
    return mixed_eps, 1.0 - mass
