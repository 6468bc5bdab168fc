"""Bracketed scalar root finding and golden-section minimisation."""

import math

from .exceptions import NoRootError

__all__ = ["find_root", "golden_section_min"]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def find_root(f, lo: float, hi: float, *, f_tol: float = 1e-9, x_tol: float = 1e-14,
              max_iter: int = 200, derivative=None) -> float:
    """Root of f in [lo, hi] with |f(root)| <= f_tol.

    Bisection maintains the bracket; when a derivative is supplied, Newton
    steps that land strictly inside the bracket are taken instead, which
    polishes the root without ever escaping the sign change.  Endpoints must
    bracket a root (f(lo) and f(hi) of opposite sign, or zero).
    """
    if not lo <= hi:
        raise ValueError(f"invalid bracket [{lo!r}, {hi!r}]")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise NoRootError(f"no sign change on [{lo!r}, {hi!r}]")
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        fx = f(x)
        if abs(fx) <= f_tol:
            return x
        if (fx < 0.0) == (flo < 0.0):
            lo, flo = x, fx
        else:
            hi = x
        if hi - lo <= x_tol * max(1.0, abs(lo), abs(hi)):
            return 0.5 * (lo + hi)
        nxt = None
        if derivative is not None:
            d = derivative(x)
            if d != 0.0 and math.isfinite(d):
                cand = x - fx / d
                if lo < cand < hi:
                    nxt = cand
        x = nxt if nxt is not None else 0.5 * (lo + hi)
    raise NoRootError(f"root refinement did not converge within {max_iter} iterations")


def golden_section_min(f, lo: float, hi: float, *, x_tol: float = 1e-6,
                       max_iter: int = 500) -> float:
    """Minimiser of a unimodal f on [lo, hi], located to interval width x_tol."""
    if not lo < hi:
        raise ValueError(f"invalid interval [{lo!r}, {hi!r}]")
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= x_tol:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)
