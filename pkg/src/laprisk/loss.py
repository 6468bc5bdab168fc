"""Distribution of the scaled privacy loss of a Laplace mechanism.

When a k-dimensional query is perturbed with i.i.d. Laplace noise, the sum
of the absolute noise magnitudes on each of two neighbouring inputs is a
Gamma(k) variable, and the privacy loss is controlled by the scaled
absolute difference of two such variables.  Working in dimensionless units
(loss measured in multiples of the calibrated level) removes the noise
scale entirely, leaving a one-parameter family with density

    p(t; k) = 2^(2-k) * t^(k-1/2) * K_{k-1/2}(t) / (sqrt(2*pi) * (k-1)!)

for t > 0, where K is the modified Bessel function of the second kind.
For k = 1 this collapses to the unit exponential density exp(-t).

The CDF has no elementary antiderivative for k > 1 and is evaluated by
adaptive quadrature of the density, which is smooth, bounded at the origin
and exponentially decaying.  CDF values are memoised per (k, t, tolerance);
the cache is invisible to callers and safe under concurrent readers.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .special import QuadratureConfig, bessel_k_half, decay_point, integrate, log_gamma

__all__ = ["LossDistribution"]


def _density(k: int, t: float) -> float:
    return (
        2.0 ** (2 - k)
        * t ** (k - 0.5)
        * bessel_k_half(k - 1, t)
        / (math.sqrt(2.0 * math.pi) * math.exp(log_gamma(k)))
    )


def _density_at_origin(k: int) -> float:
    # Limit t -> 0+ of the density; the Bessel blow-up cancels the power of t.
    return 2.0 ** (2 - 2 * k) * math.comb(2 * k - 2, k - 1)


def _integrand(k: int):
    def f(t):
        return _density(k, t) if t > 0.0 else _density_at_origin(k)

    return f


@lru_cache(maxsize=4096)
def _support_cutoff(k: int, tolerance: float) -> float:
    return decay_point(_integrand(k), 0.0, tolerance / 100.0)


@lru_cache(maxsize=65536)
def _cdf(k: int, t: float, tolerance: float, max_subdivisions: int) -> float:
    cfg = QuadratureConfig(tolerance, max_subdivisions)
    upper = min(t, _support_cutoff(k, tolerance))
    value = integrate(_integrand(k), 0.0, upper, cfg)
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class LossDistribution:
    """Dimensionless loss distribution for a query of output dimension k."""

    dimension: int
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dimension!r}")
        object.__setattr__(self, "dimension", int(self.dimension))

    def pdf(self, t: float) -> float:
        """Density at t > 0."""
        if not t > 0:
            raise ValueError(f"pdf requires t > 0, got {t!r}")
        return _density(self.dimension, t)

    def cdf(self, t: float) -> float:
        """Probability that the scaled loss does not exceed t >= 0."""
        if math.isnan(t) or t < 0:
            raise ValueError(f"cdf requires t >= 0, got {t!r}")
        if t == 0.0:
            return 0.0
        return _cdf(
            self.dimension,
            float(t),
            self.quadrature.absolute_tolerance,
            self.quadrature.max_subdivisions,
        )

    def truncated_ratio(self, eps: float, bound: float) -> float:
        """CDF of the loss conditioned on not exceeding ``bound``, evaluated at eps.

        Equals cdf(min(eps, bound)) / cdf(bound): exactly 1 once eps reaches
        the bound, and a valid CDF in eps on [0, bound].
        """
        if not bound > 0:
            raise ValueError(f"truncation bound must be positive, got {bound!r}")
        if math.isnan(eps) or eps < 0:
            raise ValueError(f"eps must be non-negative, got {eps!r}")
        if eps >= bound:
            return 1.0
        denominator = self.cdf(bound)
        if denominator <= 0.0:
            raise ValueError(f"loss mass below bound={bound!r} is numerically zero")
        return min(1.0, self.cdf(eps) / denominator)
