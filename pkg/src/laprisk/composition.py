"""Privacy accounting across repeated independent mechanism evaluations.

Three accountants are provided.  Basic composition degrades linearly in
the number of evaluations.  Advanced composition pays a sqrt(n) first term
plus a mean-drift term n*eps0*(e^eps0 - 1).  The risk-aware accountant
replaces that drift with its confidence mixture

    mu = gamma * eps * (e^eps - 1) + (1 - gamma) * eps0 * (e^eps0 - 1),

where the mechanism meets the stronger level eps with confidence gamma;
at gamma = 0 it reproduces advanced composition exactly, and it never
exceeds it.
"""

import csv
import math
from dataclasses import dataclass

__all__ = [
    "basic_composition",
    "advanced_composition",
    "par_composition",
    "CompositionLedger",
    "ComparisonRow",
    "compare",
    "write_comparison_csv",
    "read_comparison_csv",
]


def _check_common(eps0: float, n: int, delta: float) -> None:
    if not eps0 > 0:
        raise ValueError(f"eps0 must be positive, got {eps0!r}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")


def basic_composition(eps0: float, n: int) -> float:
    """Privacy level after n evaluations under linear accumulation."""
    if not eps0 > 0:
        raise ValueError(f"eps0 must be positive, got {eps0!r}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    return n * eps0


def _mixture_drift(eps0: float, eps: float, gamma: float) -> float:
    return gamma * eps * math.expm1(eps) + (1.0 - gamma) * eps0 * math.expm1(eps0)


def advanced_composition(eps0: float, n: int, delta: float) -> float:
    """Privacy level after n evaluations with slack delta."""
    _check_common(eps0, n, delta)
    return eps0 * math.sqrt(2.0 * n * math.log(1.0 / delta)) + n * eps0 * math.expm1(eps0)


def par_composition(eps0: float, eps: float, gamma: float, n: int, delta: float) -> float:
    """Privacy level after n evaluations, credited with a (eps, gamma) assessment.

    Requires eps <= eps0 and gamma in [0, 1]; dominated by
    :func:`advanced_composition` for every admissible assessment.
    """
    _check_common(eps0, n, delta)
    if eps > eps0:
        raise ValueError(f"eps ({eps!r}) must not exceed eps0 ({eps0!r})")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma!r}")
    return eps0 * math.sqrt(2.0 * n * math.log(1.0 / delta)) + n * _mixture_drift(
        eps0, eps, gamma)


class CompositionLedger:
    """Per-mechanism (eps0, eps, gamma) entries composed under a shared slack.

    Heterogeneous entries extend the identical-mechanism statement by
    applying the concentration step per entry:

        eps' = sqrt(2 * ln(1/delta) * sum_i eps0_i^2) + sum_i mu_i.

    With identical entries this coincides with :func:`par_composition`.
    """

    def __init__(self, delta: float):
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
        self.delta = delta
        self._entries: list[tuple[float, float, float]] = []

    def add(self, eps0: float, eps: float, gamma: float) -> "CompositionLedger":
        if not eps0 > 0:
            raise ValueError(f"eps0 must be positive, got {eps0!r}")
        if not 0.0 < eps <= eps0:
            raise ValueError(f"eps must lie in (0, eps0], got {eps!r}")
        if not 0.0 <= gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {gamma!r}")
        self._entries.append((eps0, eps, gamma))
        return self

    @property
    def entries(self) -> tuple[tuple[float, float, float], ...]:
        return tuple(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def compose(self) -> float:
        if not self._entries:
            raise ValueError("ledger is empty")
        squared = sum(eps0 * eps0 for eps0, _, _ in self._entries)
        drift = sum(_mixture_drift(eps0, eps, gamma) for eps0, eps, gamma in self._entries)
        return math.sqrt(2.0 * math.log(1.0 / self.delta) * squared) + drift


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    basic: float
    advanced: float
    par: float


def compare(eps0: float, delta: float, n_values, eps: float, gamma: float) -> list[ComparisonRow]:
    """Accountant comparison table, one row per evaluation count."""
    rows = []
    for n in n_values:
        rows.append(ComparisonRow(
            n=int(n),
            basic=basic_composition(eps0, int(n)),
            advanced=advanced_composition(eps0, int(n), delta),
            par=par_composition(eps0, eps, gamma, int(n), delta),
        ))
    return rows


def write_comparison_csv(path_or_handle, rows) -> None:
    handle = path_or_handle if hasattr(path_or_handle, "write") else open(
        path_or_handle, "w", newline="")
    owned = handle is not path_or_handle
    try:
        handle.write("n,basic,advanced,par\n")
        for row in rows:
            handle.write(f"{row.n},{row.basic!r},{row.advanced!r},{row.par!r}\n")
    finally:
        if owned:
            handle.close()


def read_comparison_csv(path) -> list[ComparisonRow]:
    with open(path, newline="") as handle:
        rows = [row for row in csv.reader(handle) if row and not row[0].startswith("#")]
    if not rows or rows[0] != ["n", "basic", "advanced", "par"]:
        raise ValueError(f"{path}: expected an 'n,basic,advanced,par' header")
    return [
        ComparisonRow(int(n), float(basic), float(advanced), float(par))
        for n, basic, advanced, par in rows[1:]
    ]
