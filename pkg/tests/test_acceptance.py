"""End-to-end acceptance criteria, one test per criterion.

Each test records a one-line PASS/FAIL verdict; the lines are printed in
the terminal summary (see ``conftest.py``).
"""

import math
import time

import numpy as np
import pytest

from umvue import beta_est, checks, gamma_est, mc
from umvue.numkit import Tolerance, minimize_scalar

RESULTS = {}


@pytest.fixture
def verdict(request):
    """Record the criterion's outcome whether its assertions pass or not."""
    name = request.node.name
    lines = []
    yield lines.append
    failed = getattr(request.node, "rep_call", None)
    status = "FAIL" if failed is None or failed.failed else "PASS"
    RESULTS[name] = f"{status}  {name}: {'; '.join(lines)}"


class TestAcceptance:
    def test_01_least_efficiency_table(self, verdict):
        worst = 0.0
        for b, a_ref, r_ref in checks.TABLE1_REFERENCE:
            res = beta_est.table1_row(b)
            worst = max(worst, abs(res.argmin - a_ref), abs(res.min_value - r_ref))
        t0 = time.perf_counter()
        rows = beta_est.table1(beta_est.table1_grid(0.05, 0.05, 10.0))
        elapsed = time.perf_counter() - t0
        verdict(f"max deviation {worst:.2e} (tol 1e-5), {len(rows)} rows in {elapsed:.2f} s (limit 30 s)")
        assert worst <= 1e-5
        assert len(rows) == 200 and all(r.interior for r in rows)
        assert elapsed < 30

    def test_02_are_minima(self, verdict):
        tol = Tolerance(rel=0.0, abs=1e-9)
        r1 = minimize_scalar(gamma_est.are_inv_lambda, 0.01, 10.0, tol)
        r2 = minimize_scalar(gamma_est.are_alpha_yechen, 0.01, 10.0, tol)
        verdict(f"inverse-rate argmin {r1.argmin:.6f} min {r1.min_value:.6f}; "
                f"inverse-shape argmin {r2.argmin:.6f} min {r2.min_value:.6f}")
        assert abs(r1.argmin - 0.920835) <= 1e-4 and r1.min_value > 0.964
        assert abs(r2.argmin - 0.41541) <= 1e-3 and abs(r2.min_value - 0.9281) <= 5e-4

    def test_03_unbiasedness_identity(self, verdict):
        t0 = time.perf_counter()
        res = checks.check_identity_sum(ns=(4, 5, 6), alphas=(0.5, 1.0, 2.0))
        elapsed = time.perf_counter() - t0
        verdict(f"max rel error {res.error:.2e} (tol 1e-8) in {elapsed:.2f} s (limit 10 s)")
        assert res.passed and elapsed < 10

    def test_04_density_normalization(self, verdict):
        res = checks.check_normalization(ns=(3, 4, 5, 6), alphas=(0.5, 1.0, 2.5))
        verdict(f"max |integral - 1| {res.error:.2e} (tol 1e-8)")
        assert res.passed

    def test_05_n3_coefficients(self, verdict):
        res = checks.check_n3_coefficients(200)
        verdict(f"max rel error {res.error:.2e} over m <= 200 (tol 1e-10)")
        assert res.passed

    def test_06_n2_closed_forms(self, verdict):
        r2, r3 = checks.check_n2_closed_forms(pairs=1000, seed=0)
        verdict(f"u2 vs T2 {r2.error:.2e}, u3 vs T3 {r3.error:.2e} (tol 1e-10, 1000 pairs)")
        assert r2.passed and r3.passed

    def test_07_delta_cross_check(self, verdict):
        cross, v12, vsq = checks.check_delta(np.linspace(0.2, 8.0, 10))
        verdict(f"Delta vs A0 Sigma A0^T {cross.error:.2e} (tol 1e-10); {v12.detail}; "
                f"v^2 identity {vsq.error:.2e} (tol 1e-12)")
        assert cross.passed and v12.passed and vsq.passed

    def test_08_monte_carlo_unbiasedness(self, verdict):
        t0 = time.perf_counter()
        reports = []
        for kw in checks.UNBIASEDNESS_SPECS:
            rep = mc.run_experiment(mc.ExperimentSpec(reps=100_000, seed=42, **kw))
            reports.append(rep)
        elapsed = time.perf_counter() - t0
        verdict(", ".join(f"{r.estimator} z={r.z_score:+.2f}" for r in reports)
                + f" (|z| <= 3), {elapsed:.1f} s (limit 300 s)")
        assert all(r.passed for r in reports)
        assert elapsed < 300

    def test_09_monte_carlo_clt(self, verdict):
        rep = mc.run_beta_clt(beta_est.BetaParams(2.0, 3.0), n=5000, reps=2000, seed=42, rel_tol=0.10)
        verdict(f"max entrywise rel deviation {rep.estimate_mean:.4f} (tol 0.10)")
        assert rep.passed

    def test_10_stein_identity(self, verdict):
        res = checks.check_stein(((1.0, 1.0), (2.0, 3.0), (0.5, 4.0)))
        verdict(f"max |lhs - rhs| {res.error:.2e} (tol 1e-8)")
        assert res.passed

    def test_11_bound_ordering(self, verdict):
        gap = min(gamma_est.cr_bound_sharpened(a, 1.0, n) - gamma_est.cr_bound_shape(a, 1.0, n)
                  for a in (0.3, 1.0, 3.0) for n in (4, 10, 50))
        ratio = gamma_est.cr_bound_sharpened(1.0, 1.0, 1000) / gamma_est.cr_bound_shape(1.0, 1.0, 1000)
        eq = 0.0
        for a in (0.3, 1.0, 3.0):
            for n in (4, 10, 50):
                _, var = gamma_est.efficient_h(a, n, 1.0, 0.0)
                bound = gamma_est.cr_bound_sharpened(a, gamma_est.efficient_h_prime(a, n, 1.0), n)
                eq = max(eq, abs(var - bound) / bound)
        verdict(f"smallest gap {gap:.3e} (> 0); ratio at n=1000 {ratio:.6f} (within 1%); "
                f"efficient h rel diff {eq:.1e} (tol 1e-12)")
        assert gap > 0
        assert abs(ratio - 1.0) <= 0.01 and math.isfinite(ratio)
        assert eq <= 1e-12
