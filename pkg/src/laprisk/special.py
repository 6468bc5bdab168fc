"""Scalar special functions and adaptive quadrature.

The privacy-loss distribution evaluated by this package has an elementary
density built from the modified Bessel function of the second kind at
half-integer order.  Only half-integer orders arise, because query output
dimensions are integers, so the terminating series

    K_{m+1/2}(t) = sqrt(pi / (2t)) * exp(-t)
                   * sum_{i=0..m} (m+i)! / (i! * (m-i)!) * (2t)^(-i)

is exact and is preferred to a general-order Bessel implementation.

Integration is globally adaptive Simpson: every panel carries a Richardson
error estimate, and the panel with the largest estimate is bisected until
the summed estimate meets the requested absolute tolerance.  Global (rather
than per-panel) error control lets integrable endpoint singularities such
as 1/sqrt(x) converge instead of starving the leftmost panel of budget.
"""

import heapq
import itertools
import math
from dataclasses import dataclass

from .exceptions import QuadratureError

__all__ = ["QuadratureConfig", "log_gamma", "bessel_k_half", "integrate", "decay_point"]

# Net panels created before integration is declared runaway.
_MAX_PANELS = 100_000
# log of the largest finite double, used for overflow guards.
_LOG_FLOAT_MAX = 708.0


@dataclass(frozen=True)
class QuadratureConfig:
    """Error budget for :func:`integrate`.

    ``max_subdivisions`` caps the bisection depth of any one panel.  When
    the worst panel has reached that depth and the summed error estimate
    still exceeds ``absolute_tolerance``, integration signals failure
    instead of returning a silently degraded value.
    """

    absolute_tolerance: float = 1e-10
    max_subdivisions: int = 60

    def __post_init__(self):
        if not self.absolute_tolerance > 0:
            raise ValueError("absolute_tolerance must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


def log_gamma(x: float) -> float:
    """Natural logarithm of the gamma function, restricted to x > 0.

    On the positive axis the gamma function is positive, so its logarithm
    is real; ``math.lgamma`` supplies the double-precision value.
    """
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def bessel_k_half(order_index: int, t: float) -> float:
    """Modified Bessel function of the second kind at order ``order_index + 1/2``.

    Evaluates the exact terminating series, valid for t > 0 and integer
    ``order_index`` >= 0.  The result decreases strictly in t.

    Raises OverflowError when t lies below the threshold
    ``0.5 * exp(-708 / order_index)`` at which ``(2t)**(-order_index)``
    leaves the double range.  Values of t large enough that
    ``exp(-t)`` underflows return 0.0.
    """
    m = int(order_index)
    if m != order_index or m < 0:
        raise ValueError(f"order_index must be a non-negative integer, got {order_index!r}")
    if not t > 0:
        raise ValueError(f"bessel_k_half requires t > 0, got {t!r}")
    if m > 0 and -m * math.log(2.0 * t) > _LOG_FLOAT_MAX:
        raise OverflowError(
            f"(2t)^-{m} overflows for t={t!r}; the series is usable only for "
            f"t > 0.5*exp(-708/{m})"
        )
    inv = 1.0 / (2.0 * t)
    term = 1.0
    total = 1.0
    for i in range(1, m + 1):
        # (m+i)! / (i! (m-i)!) grows by (m+i)(m-i+1)/i between terms.
        term *= (m + i) * (m - i + 1) / i * inv
        total += term
    if not math.isfinite(total):
        raise OverflowError(f"bessel_k_half({m}, {t!r}) overflowed")
    return math.sqrt(math.pi / (2.0 * t)) * math.exp(-t) * total


def decay_point(f, start: float, threshold: float, max_doublings: int = 80) -> float:
    """Smallest probed point u >= start with |f(u)| and |f(u+1)| below threshold.

    Probes ``start + 1`` and keeps doubling the offset.  Intended for
    integrands with a decaying envelope (the densities integrated here
    decay at least exponentially); for such f the tail beyond the returned
    point contributes on the order of ``threshold``.
    """
    offset = 1.0
    for _ in range(max_doublings):
        u = start + offset
        if abs(f(u)) < threshold and abs(f(u + 1.0)) < threshold:
            return u
        offset *= 2.0
    raise QuadratureError(
        "could not locate a truncation point for the improper integral; "
        "integrand does not appear to decay"
    )


def _simpson(fa: float, fm: float, fb: float, width: float) -> float:
    return width / 6.0 * (fa + 4.0 * fm + fb)


class _Panel:
    """One quadrature panel with its refined estimate and error."""

    __slots__ = ("a", "b", "fa", "fm", "fb", "fl", "fr", "estimate", "error", "depth")

    def __init__(self, f, a, b, fa, fm, fb, depth):
        self.a, self.b = a, b
        self.fa, self.fm, self.fb = fa, fm, fb
        mid = 0.5 * (a + b)
        self.fl = f(0.5 * (a + mid))
        self.fr = f(0.5 * (mid + b))
        coarse = _simpson(fa, fm, fb, b - a)
        halves = _simpson(fa, self.fl, fm, mid - a) + _simpson(fm, self.fr, fb, b - mid)
        self.estimate = halves + (halves - coarse) / 15.0
        # Richardson would put the error near |halves - coarse| / 15; using the
        # undivided difference guards against panels where the two Simpson
        # levels agree by accident before reaching the asymptotic regime.
        self.error = abs(halves - coarse)
        self.depth = depth

    def split(self, f):
        mid = 0.5 * (self.a + self.b)
        left = _Panel(f, self.a, mid, self.fa, self.fl, self.fm, self.depth + 1)
        right = _Panel(f, mid, self.b, self.fm, self.fr, self.fb, self.depth + 1)
        return left, right

    @property
    def splittable(self):
        mid = 0.5 * (self.a + self.b)
        return self.a < mid < self.b


def integrate(f, a: float, b: float, cfg: QuadratureConfig | None = None) -> float:
    """Integrate f over [a, b] to the configured absolute tolerance.

    ``b`` may be ``math.inf`` for integrands with a decaying envelope; the
    upper limit is then truncated where the integrand falls below
    ``tolerance / 100``.  An integrable singularity at the left endpoint is
    tolerated: a non-finite f(a) is replaced by a value just inside the
    interval.  Raises QuadratureError when the subdivision budget runs out
    before the tolerance is met.
    """
    if cfg is None:
        cfg = QuadratureConfig()
    if math.isnan(a) or math.isnan(b) or not a <= b:
        raise ValueError(f"invalid integration interval [{a!r}, {b!r}]")
    if a == b:
        return 0.0
    if math.isinf(b):
        b = decay_point(f, a, cfg.absolute_tolerance / 100.0)

    def eval_at(x):
        v = f(x)
        if not math.isfinite(v):
            raise QuadratureError(f"integrand is not finite at x={x!r}")
        return v

    try:
        fa = f(a)
    except (ArithmeticError, ValueError):
        fa = math.nan
    if not math.isfinite(fa):
        # Integrable left-endpoint singularity: sample just inside instead.
        fa = eval_at(a + (b - a) * 1e-15)
    root = _Panel(eval_at, a, b, fa, eval_at(0.5 * (a + b)), eval_at(b), depth=0)

    total = root.estimate
    total_error = root.error
    counter = itertools.count()
    heap = [(-root.error, next(counter), root)]
    for _ in range(_MAX_PANELS):
        if total_error <= cfg.absolute_tolerance:
            return total
        _, _, worst = heapq.heappop(heap)
        if worst.depth >= cfg.max_subdivisions or not worst.splittable:
            raise QuadratureError(
                f"integral did not converge: error estimate {total_error:.3e} exceeds "
                f"tolerance {cfg.absolute_tolerance:.3e} at depth {worst.depth}"
            )
        left, right = worst.split(eval_at)
        total += left.estimate + right.estimate - worst.estimate
        total_error += left.error + right.error - worst.error
        heapq.heappush(heap, (-left.error, next(counter), left))
        heapq.heappush(heap, (-right.error, next(counter), right))
    raise QuadratureError(f"integral did not converge within {_MAX_PANELS} panel refinements")
