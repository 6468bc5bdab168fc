"""Independent reference implementations used as test oracles.

Nothing here shares code with the package under test: Bessel values come
from scipy, loss CDFs from an incomplete-gamma closed form (the density is
a polynomial times exp(-t) for integer dimension), and the ridge oracle is
plain gradient descent.
"""

import math

import numpy as np
from scipy import special as sp


def series_coefficients(m: int) -> list[int]:
    """Exact integer coefficients (m+i)! / (i! (m-i)!) for i = 0..m."""
    coeffs = [1]
    value = 1
    for i in range(1, m + 1):
        value = value * (m + i) * (m - i + 1) // i
        coeffs.append(value)
    return coeffs


def loss_pdf_reference(k: int, t: float) -> float:
    """Density via scipy's general-order Bessel implementation."""
    return float(
        2.0 ** (2 - k) * t ** (k - 0.5) * sp.kv(k - 0.5, t)
        / (math.sqrt(2.0 * math.pi) * math.gamma(k))
    )


def loss_cdf_reference(k: int, t: float) -> float:
    """CDF via the incomplete-gamma closed form of the polynomial density.

    For integer k the density equals
        2^(1-k) / (k-1)! * exp(-t) * sum_i c_i 2^(-i) t^(k-1-i),
    so the CDF is a weighted sum of regularised lower incomplete gammas.
    """
    coeffs = series_coefficients(k - 1)
    total = 0.0
    for i, c in enumerate(coeffs):
        order = k - i
        total += c * 2.0 ** (-i) * float(sp.gammainc(order, t)) * math.gamma(order)
    return 2.0 ** (1 - k) / math.gamma(k) * total


def gradient_descent_ridge(X, y, lam, lr=None, steps=200_000, tol=1e-14):
    """Minimise ||y - Xw||^2 + lam*||w||^2 by plain gradient descent."""
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    n_features = X.shape[1]
    if lr is None:
        lipschitz = 2.0 * (np.linalg.norm(X, 2) ** 2 + lam)
        lr = 1.0 / lipschitz
    w = np.zeros(n_features)
    for _ in range(steps):
        grad = 2.0 * (X.T @ (X @ w - y) + lam * w)
        step = lr * grad
        w = w - step
        if np.max(np.abs(step)) < tol:
            break
    return w


def laplace_cdf(x, scale):
    x = np.asarray(x, float)
    return np.where(x < 0, 0.5 * np.exp(x / scale), 1.0 - 0.5 * np.exp(-x / scale))


def ecdf_sup_deviation(sorted_samples, true_cdf) -> float:
    """Kolmogorov-Smirnov statistic of sorted samples against a CDF callable."""
    n = len(sorted_samples)
    grid = true_cdf(np.asarray(sorted_samples))
    upper = np.max(np.abs(np.arange(1, n + 1) / n - grid))
    lower = np.max(np.abs(np.arange(0, n) / n - grid))
    return float(max(upper, lower))
