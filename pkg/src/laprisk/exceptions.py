"""Exception types shared across the toolkit."""

__all__ = [
    "QuadratureError",
    "NoRootError",
    "InfeasibleBudgetError",
    "InsufficientSamplesError",
]


class QuadratureError(ArithmeticError):
    """Adaptive integration exhausted its subdivision budget before meeting tolerance."""


class NoRootError(ArithmeticError):
    """The requested root does not exist in the admissible range, or refinement failed."""


class InfeasibleBudgetError(ValueError):
    """The monetary budget cannot cover the cost floor of the requested guarantee."""


class InsufficientSamplesError(RuntimeError):
    """A Monte Carlo estimate retained too few samples to be trustworthy."""
