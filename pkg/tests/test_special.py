"""Special-function values and adaptive-quadrature behaviour."""

import math

import numpy as np
import pytest
from scipy import integrate as scipy_integrate
from scipy import special as scipy_special

from laprisk import QuadratureConfig, QuadratureError, bessel_k_half, integrate, log_gamma


class TestLogGamma:
    def test_integer_factorials(self):
        for n in range(2, 21):
            expected = math.log(math.factorial(n - 1))
            assert log_gamma(n) == pytest.approx(expected, rel=1e-12)

    def test_unit_value(self):
        assert log_gamma(1.0) == 0.0

    def test_half_integer(self):
        # Gamma(1/2) = sqrt(pi), an independently known constant.
        assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), abs=1e-14)

    @pytest.mark.parametrize("bad", [0.0, -1.0, -0.5])
    def test_rejects_non_positive(self, bad):
        with pytest.raises(ValueError):
            log_gamma(bad)


class TestBesselKHalf:
    def test_order_zero(self):
        assert bessel_k_half(0, 1.0) == pytest.approx(
            math.sqrt(math.pi / 2.0) * math.exp(-1.0), rel=1e-14)
        assert bessel_k_half(0, 2.0) == pytest.approx(
            math.sqrt(math.pi) / 2.0 * math.exp(-2.0), rel=1e-14)

    def test_order_one(self):
        # K_{3/2}(t) = sqrt(pi/(2t)) e^-t (1 + 1/t)
        assert bessel_k_half(1, 1.0) == pytest.approx(
            2.0 * math.sqrt(math.pi / 2.0) * math.exp(-1.0), rel=1e-14)

    def test_against_scipy(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            m = int(rng.integers(0, 13))
            t = float(rng.uniform(0.05, 30.0))
            assert bessel_k_half(m, t) == pytest.approx(
                float(scipy_special.kv(m + 0.5, t)), rel=1e-11)

    def test_recurrence(self):
        # K_{m+1/2} = K_{m-3/2} + (2m-1)/t * K_{m-1/2}; at m=1 the first term
        # is K_{-1/2} = K_{1/2} by symmetry in the order.
        rng = np.random.default_rng(11)
        for _ in range(200):
            m = int(rng.integers(2, 13))
            t = float(rng.uniform(0.05, 25.0))
            rhs = bessel_k_half(m - 2, t) + (2 * m - 1) / t * bessel_k_half(m - 1, t)
            assert bessel_k_half(m, t) == pytest.approx(rhs, rel=1e-10)
        for t in (0.3, 1.0, 4.0):
            rhs = bessel_k_half(0, t) + (1.0 / t) * bessel_k_half(0, t)
            assert bessel_k_half(1, t) == pytest.approx(rhs, rel=1e-12)

    def test_monotone_decreasing_in_t(self):
        for m in (0, 1, 4, 9):
            values = [bessel_k_half(m, t) for t in np.linspace(0.05, 12.0, 60)]
            assert all(b < a for a, b in zip(values, values[1:]))
            assert all(v > 0 for v in values)

    def test_overflow_threshold(self):
        with pytest.raises(OverflowError):
            bessel_k_half(10, 1e-40)
        # comfortably above the documented threshold it still evaluates
        assert bessel_k_half(10, 1.0e-28) > 0

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            bessel_k_half(0, 0.0)
        with pytest.raises(ValueError):
            bessel_k_half(0, -1.0)
        with pytest.raises(ValueError):
            bessel_k_half(-1, 1.0)


class TestIntegrate:
    def test_constant(self):
        assert integrate(lambda x: 1.0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_exponential_truncated(self):
        value = integrate(lambda x: math.exp(-x), 0.0, 50.0)
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_improper_upper_limit(self):
        value = integrate(lambda x: math.exp(-x), 0.0, math.inf)
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_endpoint_singularity(self):
        cfg = QuadratureConfig(absolute_tolerance=1e-6, max_subdivisions=60)
        value = integrate(lambda x: x ** -0.5, 0.0, 1.0, cfg)
        assert value == pytest.approx(2.0, abs=1e-6)

    def test_matches_scipy_on_smooth_integrands(self):
        cases = [
            (lambda x: math.exp(-x * x), 0.0, 2.0),
            (lambda x: math.sin(x) ** 2, 0.0, 3.0),
            (lambda x: 1.0 / (1.0 + x * x), -1.0, 4.0),
        ]
        for f, a, b in cases:
            expected, _ = scipy_integrate.quad(f, a, b)
            assert integrate(f, a, b) == pytest.approx(expected, abs=1e-9)

    def test_additivity(self):
        cfg = QuadratureConfig(absolute_tolerance=1e-10, max_subdivisions=60)
        f = lambda x: math.exp(-x) * math.cos(x)
        whole = integrate(f, 0.0, 3.0, cfg)
        split = integrate(f, 0.0, 1.1, cfg) + integrate(f, 1.1, 3.0, cfg)
        assert whole == pytest.approx(split, abs=2 * cfg.absolute_tolerance)

    def test_empty_interval(self):
        assert integrate(lambda x: x, 2.0, 2.0) == 0.0

    def test_invalid_interval(self):
        with pytest.raises(ValueError):
            integrate(lambda x: x, 1.0, 0.0)

    def test_budget_exhaustion_signalled(self):
        cfg = QuadratureConfig(absolute_tolerance=1e-12, max_subdivisions=60)
        with pytest.raises(QuadratureError):
            integrate(lambda x: x ** -0.5, 0.0, 1.0, cfg)
        shallow = QuadratureConfig(absolute_tolerance=1e-12, max_subdivisions=2)
        with pytest.raises(QuadratureError):
            integrate(lambda x: math.exp(-x) * math.sin(7 * x) ** 2, 0.0, 20.0, shallow)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            QuadratureConfig(absolute_tolerance=0.0)
        with pytest.raises(ValueError):
            QuadratureConfig(max_subdivisions=0)
