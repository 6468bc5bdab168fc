"""Empirical sensitivity estimation from sampled neighbouring datasets.

When the worst-case sensitivity of a query is unknown, it can be estimated
by sampling pairs of neighbouring datasets from a pool of records standing
in for the data-generation distribution, measuring the L1 distance between
the query outputs, and reading quantiles off the empirical CDF of those
distances.  The toolbox here covers the pool normalisation contract, the
pair sampler, the supported query family, empirical-CDF construction, and
the ratio estimate relating true to sampled sensitivity.

Reproducibility contract: every sampling entry point accepts anything
``numpy.random.default_rng`` accepts.  Per-pair generators are derived by
spawning, so results are identical for any degree of parallelism given the
same master seed.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DataSource",
    "QuerySpec",
    "EmpiricalCdf",
    "normalize",
    "sample_neighbour_pair",
    "query_eval",
    "sensitivity_samples",
    "empirical_cdf",
    "sampled_sensitivity",
    "eta_estimate",
    "read_dataset_csv",
    "write_samples_csv",
    "read_samples_csv",
    "write_cdf_csv",
    "read_cdf_csv",
]

_QUERY_KINDS = ("count", "sum", "mean", "ridge")


def _freeze(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class DataSource:
    """Pool of fixed-width numeric records acting as the sampling population.

    ``target_column`` records which column (if any) was min-max scaled to
    [0, 1] by :func:`normalize`; the remaining columns of a normalised
    source form row vectors of unit (or zero) L2 norm.
    """

    records: np.ndarray
    target_column: int | None = None

    def __post_init__(self):
        records = np.asarray(self.records, dtype=float)
        if records.ndim != 2 or records.shape[0] == 0 or records.shape[1] == 0:
            raise ValueError("records must form a non-empty 2-D numeric array")
        if not np.all(np.isfinite(records)):
            raise ValueError("records must be finite")
        if self.target_column is not None and not 0 <= self.target_column < records.shape[1]:
            raise ValueError(f"target_column {self.target_column!r} out of range")
        object.__setattr__(self, "records", _freeze(records))

    @property
    def n_records(self) -> int:
        return self.records.shape[0]

    @property
    def record_width(self) -> int:
        return self.records.shape[1]


@dataclass(frozen=True)
class QuerySpec:
    """A numeric query mapping a dataset to a real vector.

    ``count`` returns the number of records (optionally only those whose
    ``column`` value reaches ``threshold``), ``sum`` and ``mean`` aggregate
    one column, and ``ridge`` returns the coefficient vector of an
    L2-regularised least-squares fit of ``target_column`` on the remaining
    columns (no intercept; objective ||y - Xw||^2 + lambda*||w||^2).
    """

    kind: str
    column: int | None = None
    threshold: float | None = None
    ridge_lambda: float | None = None
    target_column: int | None = None

    def __post_init__(self):
        if self.kind not in _QUERY_KINDS:
            raise ValueError(f"kind must be one of {_QUERY_KINDS}, got {self.kind!r}")
        if self.kind in ("sum", "mean") and self.column is None:
            raise ValueError(f"{self.kind} query requires a column")
        if self.kind == "count" and (self.column is None) != (self.threshold is None):
            raise ValueError("count predicate needs both column and threshold, or neither")
        if self.kind == "ridge":
            if self.ridge_lambda is None or not self.ridge_lambda > 0:
                raise ValueError("ridge query requires ridge_lambda > 0")
            if self.target_column is None:
                raise ValueError("ridge query requires a target_column")

    @classmethod
    def count(cls, column: int | None = None, threshold: float | None = None) -> "QuerySpec":
        return cls("count", column=column, threshold=threshold)

    @classmethod
    def sum(cls, column: int) -> "QuerySpec":
        return cls("sum", column=column)

    @classmethod
    def mean(cls, column: int) -> "QuerySpec":
        return cls("mean", column=column)

    @classmethod
    def ridge(cls, ridge_lambda: float, target_column: int) -> "QuerySpec":
        return cls("ridge", ridge_lambda=ridge_lambda, target_column=target_column)

    def output_dimension(self, record_width: int) -> int:
        if self.kind == "ridge":
            if record_width < 2:
                raise ValueError("ridge query needs at least one feature column")
            return record_width - 1
        return 1


@dataclass(frozen=True)
class EmpiricalCdf:
    """Sorted sensitivity samples with step-function evaluation and quantiles."""

    sorted_samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.sorted_samples, dtype=float)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must form a non-empty 1-D array")
        if np.any(samples < 0) or not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite and non-negative")
        if np.any(np.diff(samples) < 0):
            samples = np.sort(samples)
        object.__setattr__(self, "sorted_samples", _freeze(samples))

    @property
    def n(self) -> int:
        return self.sorted_samples.size

    def evaluate(self, x):
        """Right-continuous empirical CDF, vectorised over x."""
        counts = np.searchsorted(self.sorted_samples, x, side="right")
        result = counts / self.n
        return float(result) if np.isscalar(x) else result

    def quantile(self, q: float) -> float:
        """Generalised inverse: the ceil(q*n)-th order statistic, for q in (0, 1]."""
        if not 0.0 < q <= 1.0:
            raise ValueError(f"quantile level must lie in (0, 1], got {q!r}")
        # Shave a few ulps so that e.g. 0.9 * 10 -> 9.000000000000002 still ranks 9th.
        rank = math.ceil(q * self.n * (1.0 - 4.0 * np.finfo(float).eps))
        rank = min(max(rank, 1), self.n)
        return float(self.sorted_samples[rank - 1])


def normalize(records, target_column: int) -> DataSource:
    """Scale raw records into the sampling-pool contract.

    The target column is min-max scaled to [0, 1]; every other row vector
    is scaled to unit L2 norm (all-zero rows pass through unchanged).
    Raises ValueError for a constant target column, which cannot be
    min-max scaled.
    """
    array = np.array(records, dtype=float)
    if array.ndim != 2 or array.shape[0] == 0:
        raise ValueError("records must form a non-empty 2-D numeric array")
    if not 0 <= target_column < array.shape[1]:
        raise ValueError(f"target_column {target_column!r} out of range")
    target = array[:, target_column]
    low, high = target.min(), target.max()
    if high - low <= 0:
        raise ValueError("target column is constant and cannot be min-max scaled")
    scaled_target = (target - low) / (high - low)
    feature_cols = [c for c in range(array.shape[1]) if c != target_column]
    if feature_cols:
        features = array[:, feature_cols]
        norms = np.linalg.norm(features, axis=1)
        safe = np.where(norms > 0, norms, 1.0)
        array[:, feature_cols] = features / safe[:, None]
    array[:, target_column] = scaled_target
    return DataSource(array, target_column=target_column)


def sample_neighbour_pair(source: DataSource, p: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Two datasets of p records sharing p-1 of them and differing in the last.

    The shared records are drawn with replacement from the pool; the two
    distinguishing records are drawn at distinct pool indices so the pair
    genuinely differs (assuming the pool holds no duplicate rows).
    """
    if p < 2:
        raise ValueError(f"p must be at least 2, got {p!r}")
    if source.n_records < 2:
        raise ValueError("source needs at least two records to draw a distinct pair")
    rng = np.random.default_rng(rng)
    shared = source.records[rng.integers(0, source.n_records, size=p - 1)]
    own_a, own_b = rng.choice(source.n_records, size=2, replace=False)
    first = np.vstack([shared, source.records[own_a][None, :]])
    second = np.vstack([shared, source.records[own_b][None, :]])
    return first, second


def query_eval(query: QuerySpec, data) -> np.ndarray:
    """Evaluate a query on a dataset, returning a vector of its output dimension."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValueError("dataset must be a non-empty 2-D array")
    if query.kind == "count":
        if query.column is None:
            return np.array([float(data.shape[0])])
        return np.array([float(np.count_nonzero(data[:, query.column] >= query.threshold))])
    if query.kind == "sum":
        return np.array([float(data[:, query.column].sum())])
    if query.kind == "mean":
        return np.array([float(data[:, query.column].mean())])
    # ridge
    target = query.target_column
    if not 0 <= target < data.shape[1]:
        raise ValueError(f"target_column {target!r} out of range")
    predictors = np.delete(data, target, axis=1)
    response = data[:, target]
    gram = predictors.T @ predictors + query.ridge_lambda * np.eye(predictors.shape[1])
    moment = predictors.T @ response
    weights = np.linalg.solve(gram, moment)
    residual = np.linalg.norm(gram @ weights - moment)
    if residual > 1e-8 * max(1.0, np.linalg.norm(moment)):
        raise ArithmeticError(f"ridge normal equations solved poorly (residual {residual:.3e})")
    return weights


def sensitivity_samples(source: DataSource, query: QuerySpec, p: int, n: int, rng) -> np.ndarray:
    """n draws of the sensitivity random variable ||f(x) - f(y)||_1 over sampled pairs."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    master = np.random.default_rng(rng)
    samples = np.empty(n)
    for i, stream in enumerate(master.spawn(n)):
        first, second = sample_neighbour_pair(source, p, stream)
        gap = query_eval(query, first) - query_eval(query, second)
        samples[i] = np.abs(gap).sum()
    return samples


def empirical_cdf(samples) -> EmpiricalCdf:
    """Empirical CDF of a non-empty sample of sensitivities."""
    return EmpiricalCdf(np.sort(np.asarray(samples, dtype=float)))


def sampled_sensitivity(cdf: EmpiricalCdf, confidence: float) -> float:
    """Sensitivity quantile at the requested confidence level in (0, 1]."""
    return cdf.quantile(confidence)


def eta_estimate(cdf: EmpiricalCdf, accuracy: float, delta_true: float | None = None,
                 confidence: float = 1.0) -> float:
    """Ratio of true to sampled sensitivity.

    With a known true sensitivity the ratio is exact relative to the
    sampled quantile at ``confidence``.  Without one, the largest observed
    sensitivity is used together with the estimation accuracy, giving
    1 + accuracy / max_sample; this takes the optimistic unit constant in
    the first-order correction and is documented as such.
    """
    if not 0.0 < accuracy < 1.0:
        raise ValueError(f"accuracy must lie in (0, 1), got {accuracy!r}")
    if delta_true is not None:
        if not delta_true > 0:
            raise ValueError(f"delta_true must be positive, got {delta_true!r}")
        reference = sampled_sensitivity(cdf, confidence)
        if reference <= 0:
            raise ValueError("sampled sensitivity is zero; ratio undefined (degenerate query)")
        return delta_true / reference
    largest = cdf.quantile(1.0)
    if largest <= 0:
        raise ValueError("sampled sensitivity is zero; ratio undefined (degenerate query)")
    return 1.0 + accuracy / largest


def read_dataset_csv(path) -> tuple[list[str], np.ndarray]:
    """Read a numeric dataset CSV with a header row; '#' lines are skipped."""
    with open(path, newline="") as handle:
        rows = [row for row in csv.reader(handle) if row and not row[0].startswith("#")]
    if len(rows) < 2:
        raise ValueError(f"{path}: expected a header row and at least one data row")
    header = rows[0]
    try:
        data = np.array([[float(cell) for cell in row] for row in rows[1:]])
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric cell in data rows ({exc})") from None
    if data.shape[1] != len(header):
        raise ValueError(f"{path}: ragged rows")
    return header, data


def _open_out(path_or_handle, mode="w"):
    if hasattr(path_or_handle, "write"):
        return path_or_handle, False
    return open(path_or_handle, mode, newline=""), True


def write_samples_csv(path_or_handle, samples, seed: int | None = None) -> None:
    """Write sensitivity samples as a single-column CSV with optional seed header."""
    handle, owned = _open_out(path_or_handle)
    try:
        if seed is not None:
            handle.write(f"# seed={seed}\n")
        handle.write("sensitivity\n")
        for value in np.asarray(samples, dtype=float):
            handle.write(f"{float(value)!r}\n")
    finally:
        if owned:
            handle.close()


def read_samples_csv(path) -> np.ndarray:
    with open(path, newline="") as handle:
        rows = [row for row in csv.reader(handle) if row and not row[0].startswith("#")]
    if not rows or rows[0] != ["sensitivity"]:
        raise ValueError(f"{path}: expected a 'sensitivity' header")
    return np.array([float(row[0]) for row in rows[1:]])


def write_cdf_csv(path_or_handle, cdf: EmpiricalCdf, seed: int | None = None) -> None:
    """Write an empirical CDF as (value, cdf) rows with optional seed header."""
    handle, owned = _open_out(path_or_handle)
    try:
        if seed is not None:
            handle.write(f"# seed={seed}\n")
        handle.write("value,cdf\n")
        levels = np.arange(1, cdf.n + 1) / cdf.n
        for value, level in zip(cdf.sorted_samples, levels):
            handle.write(f"{float(value)!r},{float(level)!r}\n")
    finally:
        if owned:
            handle.close()


def read_cdf_csv(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as handle:
        rows = [row for row in csv.reader(handle) if row and not row[0].startswith("#")]
    if not rows or rows[0] != ["value", "cdf"]:
        raise ValueError(f"{path}: expected a 'value,cdf' header")
    values = np.array([float(row[0]) for row in rows[1:]])
    levels = np.array([float(row[1]) for row in rows[1:]])
    return values, levels
