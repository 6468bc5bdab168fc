"""The Laplace mechanism, its utility metrics, and a noise-overlap diagnostic.

Noise is sampled by inverting the Laplace CDF on a single uniform draw per
coordinate.  This pins the mapping from the underlying uniform stream to
the output, so runs are bit-reproducible across platforms given the same
generator state.
"""

import math
from dataclasses import dataclass

import numpy as np

from .sensitivity import DataSource, QuerySpec, normalize, query_eval

__all__ = [
    "LaplaceMechanism",
    "laplace_sample",
    "expected_mae",
    "overlap",
    "synthetic_regression_source",
    "rmse_runs",
    "rmse_experiment",
    "write_rmse_csv",
]


def _laplace_from_uniform(u, scale):
    """Inverse-CDF transform of uniforms in [0, 1) to Laplace(0, scale)."""
    u = np.clip(u, np.finfo(float).tiny, 1.0)  # u == 0 would map to -inf
    return np.where(u >= 0.5, -scale * np.log(2.0 * (1.0 - u)), scale * np.log(2.0 * u))


def laplace_sample(scale: float, rng) -> float:
    """One zero-mean Laplace draw with the given scale, from one uniform draw."""
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale!r}")
    rng = np.random.default_rng(rng)
    return float(_laplace_from_uniform(rng.random(), scale))


@dataclass(frozen=True)
class LaplaceMechanism:
    """Additive Laplace noise calibrated by sensitivity and privacy level.

    Each of the ``dimension`` output coordinates receives independent
    Laplace noise of scale ``sensitivity / epsilon0``.
    """

    sensitivity: float
    epsilon0: float
    dimension: int = 1

    def __post_init__(self):
        if not self.sensitivity > 0:
            raise ValueError(f"sensitivity must be positive, got {self.sensitivity!r}")
        if not self.epsilon0 > 0:
            raise ValueError(f"epsilon0 must be positive, got {self.epsilon0!r}")
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dimension!r}")
        object.__setattr__(self, "dimension", int(self.dimension))

    @property
    def scale(self) -> float:
        return self.sensitivity / self.epsilon0

    def apply(self, true_output, rng) -> np.ndarray:
        """Perturb a length-``dimension`` query output with fresh noise."""
        values = np.asarray(true_output, dtype=float)
        if values.shape != (self.dimension,):
            raise ValueError(
                f"expected output of shape ({self.dimension},), got {values.shape}"
            )
        rng = np.random.default_rng(rng)
        return values + _laplace_from_uniform(rng.random(self.dimension), self.scale)


def expected_mae(sensitivity: float, eps: float) -> float:
    """Expected absolute error per coordinate of a Laplace mechanism: sensitivity / eps."""
    if not sensitivity > 0:
        raise ValueError(f"sensitivity must be positive, got {sensitivity!r}")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    return sensitivity / eps


def overlap(eps1: float, eps2: float, sensitivity: float) -> float:
    """Overlapping probability mass of two Laplace noise distributions.

    Both distributions are centred at zero with scales sensitivity/eps1 and
    sensitivity/eps2.  The result is symmetric in the two levels, equals 1
    when they coincide, and shrinks as they separate.
    """
    if not (eps1 > 0 and eps2 > 0 and sensitivity > 0):
        raise ValueError("overlap requires positive privacy levels and sensitivity")
    if eps2 > eps1:
        eps1, eps2 = eps2, eps1
    if eps1 == eps2:
        return 1.0
    crossing = sensitivity * math.log(eps1 / eps2) / (eps1 - eps2)
    return 1.0 - (
        math.exp(-crossing * eps2 / sensitivity) - math.exp(-crossing * eps1 / sensitivity)
    )


def synthetic_regression_source(n_records: int, n_features: int, rng,
                                noise_scale: float = 0.1) -> DataSource:
    """Gaussian-feature regression pool for desk-scale experiments.

    Features are standard normal, the response is a random linear
    combination plus Gaussian noise, and the result is normalised into the
    usual pool contract (unit-norm feature rows, response in [0, 1]) with
    the response stored in the last column.
    """
    if n_records < 2 or n_features < 1:
        raise ValueError("need at least two records and one feature")
    rng = np.random.default_rng(rng)
    features = rng.normal(size=(n_records, n_features))
    coefficients = rng.normal(size=n_features)
    response = features @ coefficients + noise_scale * rng.normal(size=n_records)
    return normalize(np.column_stack([features, response]), target_column=n_features)


def rmse_runs(source: DataSource, query: QuerySpec, mechanism: LaplaceMechanism,
              runs: int, split_fraction: float = 0.8, rng=None) -> np.ndarray:
    """Held-out RMSE of noise-perturbed ridge coefficients, one value per run.

    Each run reshuffles the train/test split, fits the ridge query on the
    training records, perturbs the coefficients with the mechanism, and
    scores the noisy predictor on the held-out records.  Runs use spawned
    generators, so results do not depend on evaluation order.
    """
    if query.kind != "ridge":
        raise ValueError("the RMSE experiment is defined for ridge queries")
    if runs < 1:
        raise ValueError(f"runs must be at least 1, got {runs!r}")
    if not 0.0 < split_fraction < 1.0:
        raise ValueError(f"split_fraction must lie in (0, 1), got {split_fraction!r}")
    master = np.random.default_rng(rng)
    target = query.target_column
    results = np.empty(runs)
    for i, stream in enumerate(master.spawn(runs)):
        order = stream.permutation(source.n_records)
        n_train = min(max(int(round(split_fraction * source.n_records)), 1),
                      source.n_records - 1)
        train = source.records[order[:n_train]]
        test = source.records[order[n_train:]]
        weights = query_eval(query, train)
        noisy = mechanism.apply(weights, stream)
        predictors = np.delete(test, target, axis=1)
        errors = predictors @ noisy - test[:, target]
        results[i] = math.sqrt(float(np.mean(errors**2)))
    return results


def rmse_experiment(source: DataSource, query: QuerySpec, mechanism: LaplaceMechanism,
                    runs: int, split_fraction: float = 0.8, rng=None) -> float:
    """Mean held-out RMSE over the requested number of runs."""
    return float(np.mean(rmse_runs(source, query, mechanism, runs, split_fraction, rng)))


def write_rmse_csv(path_or_handle, rows, seed: int | None = None) -> None:
    """Write (eps0, run, rmse) rows for external plotting."""
    handle = path_or_handle if hasattr(path_or_handle, "write") else open(
        path_or_handle, "w", newline="")
    owned = handle is not path_or_handle
    try:
        if seed is not None:
            handle.write(f"# seed={seed}\n")
        handle.write("eps0,run,rmse\n")
        for eps0, run, rmse in rows:
            handle.write(f"{float(eps0)!r},{int(run)},{float(rmse)!r}\n")
    finally:
        if owned:
            handle.close()
