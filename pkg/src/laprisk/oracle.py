"""Simulation oracles that validate the analytic risk formulas.

The distribution-level oracle draws the absolute difference of two
Gamma(k) variables, built as sums of unit exponentials, and estimates the
truncated tail ratio directly; it instantiates exactly the random
variables behind the analytic confidence and is the authoritative
validator.  The mechanism-level oracle perturbs a concrete query-output
pair and measures the realised log-density ratio; at mechanism level the
two absolute-noise sums share one noise draw, so its estimate may sit away
from the analytic value, and it is reported as a labelled diagnostic with
the gap rather than asserted equal.

Sampling is chunked with spawned per-chunk generators and merged by
summing acceptance counts, so estimates are identical however the chunks
would be scheduled.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InsufficientSamplesError
from .risk import explicit_confidence
from .sensitivity import DataSource, QuerySpec, sensitivity_samples

__all__ = [
    "McConfig",
    "McEstimate",
    "gamma_sampler",
    "simulate_confidence",
    "simulate_mechanism_loss",
    "simulate_sensitivity_coverage",
    "validate_confidence",
]

_CHUNK = 1 << 18
_MIN_KEPT = 1000


@dataclass(frozen=True)
class McConfig:
    """Sampling budget and seeding for the simulation oracles.

    ``worker_hint`` is a scheduling hint only; chunk layout and seeding
    derive from ``sample_count`` and ``master_seed`` alone, so results are
    identical for any hint.
    """

    sample_count: int = 1_000_000
    master_seed: int = 0
    worker_hint: int = 1

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError(f"sample_count must be at least 1, got {self.sample_count!r}")
        if self.worker_hint < 1:
            raise ValueError(f"worker_hint must be at least 1, got {self.worker_hint!r}")


@dataclass(frozen=True)
class McEstimate:
    """A proportion estimate with its binomial standard error."""

    value: float
    stderr: float
    samples_kept: int
    samples_total: int


def _binomial_stderr(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n) if n > 0 else math.inf


def _exponential_sum(rng, shape: int, size: int) -> np.ndarray:
    # Gamma(shape, 1) as a sum of unit exponentials; 1 - U avoids log(0).
    draws = rng.random((size, shape))
    return -np.log1p(-draws).sum(axis=1)


def gamma_sampler(shape: int, rng, size: int | None = None):
    """Gamma(shape, 1) draws built as sums of unit exponentials."""
    if int(shape) != shape or shape < 1:
        raise ValueError(f"shape must be a positive integer, got {shape!r}")
    rng = np.random.default_rng(rng)
    values = _exponential_sum(rng, int(shape), 1 if size is None else int(size))
    return float(values[0]) if size is None else values


def _chunk_sizes(total: int):
    while total > 0:
        step = min(total, _CHUNK)
        yield step
        total -= step


def simulate_confidence(eps: float, eps0: float, k: int, config: McConfig) -> McEstimate:
    """Simulated confidence of meeting eps given an eps0 calibration.

    Draws the Gamma-difference loss, keeps draws at or below eps0, and
    returns the kept fraction at or below eps.  Raises
    InsufficientSamplesError when fewer than 1000 draws survive the
    truncation.
    """
    if not 0.0 <= eps <= eps0:
        raise ValueError(f"need 0 <= eps <= eps0, got eps={eps!r}, eps0={eps0!r}")
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    master = np.random.default_rng(config.master_seed)
    kept = 0
    hits = 0
    sizes = list(_chunk_sizes(config.sample_count))
    for stream, size in zip(master.spawn(len(sizes)), sizes):
        losses = np.abs(_exponential_sum(stream, k, size) - _exponential_sum(stream, k, size))
        within = losses[losses <= eps0]
        kept += within.size
        hits += int(np.count_nonzero(within <= eps))
    if kept < _MIN_KEPT:
        raise InsufficientSamplesError(
            f"only {kept} of {config.sample_count} draws fell within the truncation "
            f"bound {eps0!r}; increase sample_count"
        )
    value = hits / kept
    return McEstimate(value, _binomial_stderr(value, kept), kept, config.sample_count)


def simulate_mechanism_loss(eps: float, eps0: float, fx, fy, config: McConfig) -> McEstimate:
    """Simulated probability that the realised privacy loss stays within eps.

    Perturbs fx with calibrated Laplace noise and evaluates the exact
    log-density ratio of the output under fx versus fy.  Diagnostic only:
    see the module docstring for why this may differ from the
    distribution-level value.
    """
    fx = np.asarray(fx, dtype=float)
    fy = np.asarray(fy, dtype=float)
    if fx.shape != fy.shape or fx.ndim != 1:
        raise ValueError("fx and fy must be 1-D vectors of equal length")
    sensitivity = float(np.abs(fx - fy).sum())
    if sensitivity == 0.0:
        raise ValueError("fx and fy coincide; the privacy loss is identically zero")
    if not eps0 > 0:
        raise ValueError(f"eps0 must be positive, got {eps0!r}")
    scale = sensitivity / eps0
    master = np.random.default_rng(config.master_seed)
    hits = 0
    sizes = list(_chunk_sizes(config.sample_count))
    for stream, size in zip(master.spawn(len(sizes)), sizes):
        outputs = fx + stream.laplace(scale=scale, size=(size, fx.size))
        losses = (eps0 / sensitivity) * (
            np.abs(fy - outputs).sum(axis=1) - np.abs(fx - outputs).sum(axis=1)
        )
        # the loss cannot exceed eps0 in magnitude (triangle inequality);
        # clamping removes only roundoff on the saturated plateau
        losses = np.clip(losses, -eps0, eps0)
        hits += int(np.count_nonzero(np.abs(losses) <= eps))
    value = hits / config.sample_count
    return McEstimate(value, _binomial_stderr(value, config.sample_count),
                      config.sample_count, config.sample_count)


def simulate_sensitivity_coverage(source: DataSource, query: QuerySpec, p: int, eps: float,
                                  sensitivity_bound: float, config: McConfig) -> McEstimate:
    """Fraction of freshly sampled neighbour pairs whose sensitivity stays within the bound.

    Validates a quantile choice on out-of-sample pairs.  ``eps`` is the
    privacy level the bound calibrates and is carried for reporting only;
    the sampled event does not involve it.
    """
    if sensitivity_bound < 0:
        raise ValueError(f"sensitivity_bound must be non-negative, got {sensitivity_bound!r}")
    samples = sensitivity_samples(source, query, p, config.sample_count,
                                  np.random.default_rng(config.master_seed))
    value = float(np.mean(samples <= sensitivity_bound))
    return McEstimate(value, _binomial_stderr(value, config.sample_count),
                      config.sample_count, config.sample_count)


def validate_confidence(eps: float, eps0: float, k: int, config: McConfig,
                        tolerance: float = 0.005) -> dict:
    """Analytic-versus-simulated confidence report.

    Passes when the gap is within max(4 * stderr, tolerance).  The report
    is JSON-ready: {analytic, mc_estimate, stderr, gap, pass}.
    """
    analytic = explicit_confidence(eps, eps0, k)
    estimate = simulate_confidence(eps, eps0, k, config)
    gap = abs(analytic - estimate.value)
    return {
        "analytic": analytic,
        "mc_estimate": estimate.value,
        "stderr": estimate.stderr,
        "gap": gap,
        "pass": bool(gap <= max(4.0 * estimate.stderr, tolerance)),
    }
