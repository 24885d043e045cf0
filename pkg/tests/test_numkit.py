import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from umvue.errors import ConfigError, NonConvergence
from umvue.numkit import Tolerance, integrate, minimize_scalar, sum_series
from umvue.specfun import log_beta, trigamma


class TestTolerance:
    def test_defaults(self):
        tol = Tolerance()
        assert (tol.rel, tol.abs) == (1e-10, 1e-12)

    @pytest.mark.parametrize("kw", [dict(rel=-1.0), dict(abs=-1.0), dict(rel=0.0, abs=0.0),
                                    dict(max_iter=0)])
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            Tolerance(**kw)

    def test_bound(self):
        assert Tolerance(rel=1e-3, abs=1e-6).bound(-10.0) == pytest.approx(1e-2)
        assert Tolerance(rel=1e-3, abs=1e-6).bound(0.0) == 1e-6


class TestIntegrate:
    def test_constant(self):
        np.testing.assert_allclose(integrate(lambda x: np.ones_like(x), 0.0, 1.0), 1.0, rtol=1e-13)

    def test_inverse_sqrt_endpoint(self):
        np.testing.assert_allclose(integrate(lambda x: x**-0.5, 0.0, 1.0), 2.0, rtol=1e-10)

    def test_singular_nonzero_endpoint_is_flagged(self):
        # abscissae stop one ulp short of 1, which loses about 1e-8 of the mass
        with pytest.raises(NonConvergence):
            integrate(lambda x: (1 - x) ** -0.5, 0.0, 1.0)

    def test_singular_endpoint_reflected(self):
        np.testing.assert_allclose(integrate(lambda t: t**-0.5, 0.0, 1.0), 2.0, rtol=1e-10)

    def test_smooth_nonzero_endpoints(self):
        np.testing.assert_allclose(integrate(np.exp, 1.0, 2.0), math.e**2 - math.e, rtol=1e-12)

    def test_beta_integrand(self):
        val = integrate(lambda x: x**1.5 * (1 - x) ** 0.5, 0.0, 1.0)
        np.testing.assert_allclose(val, math.exp(log_beta(2.5, 1.5)), rtol=1e-10)

    def test_log_singularity(self):
        np.testing.assert_allclose(integrate(np.log, 0.0, 1.0), -1.0, rtol=1e-10)

    def test_oscillatory(self):
        np.testing.assert_allclose(integrate(np.sin, 0.0, 20.0), 1 - math.cos(20.0), rtol=1e-10)

    def test_nonfinite_integrand_raises(self):
        with pytest.raises(NonConvergence):
            integrate(lambda x: np.where(x > 0.5, np.nan, 1.0), 0.0, 1.0)

    def test_too_strong_singularity_raises(self):
        # x**-0.97 is integrable but its mass near 0 lies far below double precision reach
        with pytest.raises(NonConvergence):
            integrate(lambda x: x**-0.97, 0.0, 1.0)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(-5, 5), min_size=4, max_size=4),
           st.lists(st.floats(-5, 5), min_size=4, max_size=4),
           st.floats(-3, 3), st.floats(-3, 3))
    def test_linear(self, pc, qc, a, b):
        tol = Tolerance()
        f = np.polynomial.Polynomial(pc)
        g = np.polynomial.Polynomial(qc)
        lhs = integrate(lambda x: a * f(x) + b * g(x), -1.0, 2.0, tol)
        rhs = a * integrate(f, -1.0, 2.0, tol) + b * integrate(g, -1.0, 2.0, tol)
        scale = max(abs(lhs), abs(rhs), 1.0)
        assert abs(lhs - rhs) <= 10 * tol.bound(scale)


class TestMinimizeScalar:
    def test_quadratic(self):
        res = minimize_scalar(lambda x: (x - 2) ** 2, 0.0, 5.0)
        assert res.converged
        assert abs(res.argmin - 2.0) <= 1e-8

    def test_cos(self):
        res = minimize_scalar(math.cos, 2.0, 4.0)
        np.testing.assert_allclose(res.argmin, math.pi, atol=1e-8)
        np.testing.assert_allclose(res.min_value, -1.0, atol=1e-15)

    def test_are_minimizer(self):
        res = minimize_scalar(lambda a: trigamma(a) / (a * a * trigamma(a) ** 2 - 1), 0.1, 3.0)
        np.testing.assert_allclose(res.argmin, 0.920835, atol=1e-4)

    def test_bracket_width_within_tolerance(self):
        res = minimize_scalar(lambda x: (x - 0.3) ** 2, 0.0, 1.0, Tolerance(rel=0.0, abs=1e-6))
        lo, hi = res.bracket
        assert hi - lo <= 1e-6
        assert lo <= res.argmin <= hi

    def test_plateau_returns_leftmost(self):
        res = minimize_scalar(lambda x: max(abs(x) - 1.0, 0.0), -3.0, 3.0)
        assert res.min_value == 0.0
        assert res.argmin <= 0.0

    @given(st.floats(-10, 10), st.floats(0.1, 10))
    def test_convex_quadratic_vertex(self, c, k):
        res = minimize_scalar(lambda x: k * (x - c) ** 2 + 1.0, -20.0, 20.0,
                              Tolerance(rel=0.0, abs=1e-7))
        assert abs(res.argmin - c) <= 1e-7

    def test_iteration_budget(self):
        with pytest.raises(NonConvergence):
            minimize_scalar(math.cos, 2.0, 4.0, Tolerance(rel=0.0, abs=1e-12, max_iter=3))


class TestSumSeries:
    def test_single_term(self):
        assert sum_series(lambda m: 7.0 if m == 0 else 0.0) == 7.0

    def test_geometric(self):
        # stops once 5 successive terms fall below rel * |sum|
        np.testing.assert_allclose(sum_series(lambda m: 2.0**-m), 2.0, rtol=1e-10)

    def test_alternating(self):
        np.testing.assert_allclose(sum_series(lambda m: (-1) ** m / math.factorial(m)),
                                   math.exp(-1), rtol=1e-10)

    def test_harmonic_raises(self):
        with pytest.raises(NonConvergence) as info:
            sum_series(lambda m: 1.0 / (m + 1), Tolerance(max_iter=10_000))
        assert info.value.partial > 9.0

    def test_nonfinite_term_raises(self):
        with pytest.raises(NonConvergence):
            sum_series(lambda m: math.inf if m == 3 else 2.0**-m)
