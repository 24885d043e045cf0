import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import special

from umvue import beta_est as be
from umvue import mc
from umvue.beta_est import BetaParams
from umvue.errors import DegenerateSample, DomainError, NonConvergence, SingularityError

unit = st.floats(1e-6, 1 - 1e-6)
shape = st.floats(0.05, 50)

# published rows of the least-efficiency table: beta, alpha*, rho1*
TABLE_ROWS = [
    (0.05, 0.179398, 0.712626),
    (0.5, 0.315422, 0.929356),
    (1.0, 0.322936, 0.949046),
    (2.5, 0.333239, 0.949496),
    (5.0, 0.352973, 0.943370),
    (10.0, 0.374822, 0.937431),
]


def mp_beta_moments(a, b):
    """Mean and covariance of (X, L(X), X L(X)) by multiprecision quadrature."""
    with mp.workdps(25):
        a, b = mp.mpf(a), mp.mpf(b)
        norm = mp.beta(a, b)

        def E(f):
            return mp.quad(lambda x: f(x) * x ** (a - 1) * (1 - x) ** (b - 1), [0, 0.5, 1]) / norm

        fs = [lambda x: x, lambda x: mp.log(x / (1 - x)), lambda x: x * mp.log(x / (1 - x))]
        mu = [E(f) for f in fs]
        cov = [[E(lambda x, f=f, g=g: f(x) * g(x)) - mf * mg for g, mg in zip(fs, mu)]
               for f, mf in zip(fs, mu)]
        return np.array(mu, dtype=float), np.array(cov, dtype=float)


class TestKernel:
    def test_value(self):
        np.testing.assert_allclose(be.stein_kernel(0.2, 0.8), 0.3 * math.log(16), rtol=1e-15)

    @given(unit, unit)
    def test_nonnegative_symmetric(self, x1, x2):
        k = be.stein_kernel(x1, x2)
        assert k >= 0
        assert k == be.stein_kernel(x2, x1)
        assert (k == 0) == (x1 == x2)

    def test_broadcast(self):
        out = be.stein_kernel(np.array([0.1, 0.5]), 0.9)
        assert out.shape == (2,)

    def test_domain(self):
        with pytest.raises(DomainError):
            be.stein_kernel(0.0, 0.5)


class TestFit:
    x = np.array([0.12, 0.35, 0.41, 0.77, 0.58, 0.23, 0.9])

    def test_ratio_identities(self):
        f = be.fit_beta(self.x)
        np.testing.assert_allclose(f.alpha_hat, self.x.mean() / f.v_stat, rtol=1e-14)
        np.testing.assert_allclose(f.alpha_hat + f.beta_hat, 1 / f.v_stat, rtol=1e-14)
        np.testing.assert_allclose(f.u_stat, 7 / 6 * f.v_stat, rtol=1e-14)

    def test_u_stat_is_pair_average(self):
        i, j = np.triu_indices(self.x.size, k=1)
        np.testing.assert_allclose(be.fit_beta(self.x).u_stat,
                                   be.stein_kernel(self.x[i], self.x[j]).mean(), rtol=1e-13)

    def test_exchange_symmetry(self):
        f, g = be.fit_beta(self.x), be.fit_beta(1 - self.x)
        np.testing.assert_allclose([g.alpha_hat, g.beta_hat], [f.beta_hat, f.alpha_hat], rtol=1e-12)
        np.testing.assert_allclose([g.se_alpha, g.se_beta], [f.se_beta, f.se_alpha], rtol=1e-10)

    def test_standard_errors(self):
        f = be.fit_beta(self.x)
        d = be.delta_matrix(BetaParams(f.alpha_hat, f.beta_hat))
        np.testing.assert_allclose([f.se_alpha, f.se_beta], np.sqrt(np.diag(d) / 7), rtol=1e-14)

    def test_batch(self):
        x = mc.beta_draws(BetaParams(0.7, 2.0), (25, 6), mc.substream(4))
        a, b, u, v = be.fit_beta_batch(x)
        for k, row in enumerate(x):
            f = be.fit_beta(row)
            np.testing.assert_allclose([a[k], b[k], u[k], v[k]],
                                       [f.alpha_hat, f.beta_hat, f.u_stat, f.v_stat], rtol=1e-10)

    def test_batch_degenerate_is_nan(self):
        a, *_ = be.fit_beta_batch(np.full((2, 3), 0.4))
        assert np.all(np.isnan(a))

    def test_degenerate(self):
        with pytest.raises(DegenerateSample):
            be.fit_beta([0.3, 0.3, 0.3])

    @pytest.mark.parametrize("data", [[0.5], [0.0, 0.5], [0.5, 1.0], [0.5, np.nan]])
    def test_bad_samples(self, data):
        with pytest.raises(DomainError):
            be.BetaSample(data)

    @settings(max_examples=40)
    @given(st.lists(unit, min_size=2, max_size=20, unique=True))
    def test_positive(self, data):
        assume(np.ptp(data) > 1e-9)
        f = be.fit_beta(data)
        assert f.alpha_hat > 0 and f.beta_hat > 0

    def test_as_dict(self):
        assert set(be.fit_beta(self.x).as_dict()) >= {"alpha_hat", "beta_hat", "se_alpha"}

    def test_consistency(self):
        p = BetaParams(2.0, 3.0)
        errs = []
        for n in (100, 10_000, 1_000_000):
            f = be.fit_beta(mc.sample_beta(p, n, 7))
            errs.append(abs(f.alpha_hat - 2.0) + abs(f.beta_hat - 3.0))
        assert errs[2] < errs[0] / 10
        assert errs[2] < 0.02


class TestMoments:
    @pytest.mark.parametrize("a,b", [(2.0, 3.0), (0.5, 1.5)])
    def test_against_quadrature(self, a, b):
        mu, sigma = be.moments_xyz(BetaParams(a, b))
        mu_ref, sigma_ref = mp_beta_moments(a, b)
        np.testing.assert_allclose(mu, mu_ref, rtol=1e-8, atol=1e-12)
        np.testing.assert_allclose(sigma, sigma_ref, rtol=1e-8, atol=1e-12)

    @given(shape, shape)
    def test_k_maps_recover_params(self, a, b):
        mu, _ = be.moments_xyz(BetaParams(a, b))
        np.testing.assert_allclose(be.k_maps(mu), [a, b], rtol=1e-8)

    def test_jacobian_finite_differences(self):
        mu, _ = be.moments_xyz(BetaParams(1.3, 2.1))
        h = 1e-6
        fd = np.column_stack([(be.k_maps(mu + h * e) - be.k_maps(mu - h * e)) / (2 * h)
                              for e in np.eye(3)])
        np.testing.assert_allclose(be.jacobian_A0(mu), fd, rtol=1e-7)

    def test_singular(self):
        with pytest.raises(SingularityError):
            be.jacobian_A0([0.5, 2.0, 1.0])
        with pytest.raises(SingularityError):
            be.k_maps([0.5, 2.0, 1.0])


class TestDelta:
    @settings(max_examples=50)
    @given(st.floats(0.05, 20), st.floats(0.05, 20))
    def test_matches_jacobian_form(self, a, b):
        p = BetaParams(a, b)
        d = be.delta_matrix(p)
        np.testing.assert_allclose(be.delta_via_jacobian(p), d, rtol=1e-8)
        np.testing.assert_array_equal(d, d.T)
        assert d[0, 1] > 0
        np.testing.assert_allclose(d[0, 1] * (a + b + 1), be.v12_positive_form(p), rtol=1e-10)

    def test_swap(self):
        p = BetaParams(0.7, 4.0)
        np.testing.assert_allclose(be.delta_matrix(p.swapped()), be.delta_matrix(p)[::-1, ::-1],
                                   rtol=1e-14)

    def test_dominates_inverse_fisher(self):
        for a, b in [(0.3, 0.3), (1.0, 5.0), (8.0, 2.0)]:
            p = BetaParams(a, b)
            _, Jinv = be.fisher_beta(p)
            assert np.all(np.linalg.eigvalsh(be.delta_matrix(p) - Jinv) > -1e-12)

    def test_v_sq_from_sigma(self):
        # U_n estimates z - x y, whose gradient is (-y, -x, 1)
        p = BetaParams(2.0, 3.0)
        mu, sigma = be.moments_xyz(p)
        g = np.array([-mu[1], -mu[0], 1.0])
        np.testing.assert_allclose(be.v_sq_un(p), g @ sigma @ g, rtol=1e-12)
        np.testing.assert_allclose(be.v_sq_un(p), 0.0682613920145247815844598799984, rtol=1e-13)
        np.testing.assert_allclose(be.v_sq_inv_vn(p), 625 * be.v_sq_un(p), rtol=1e-15)


class TestFisher:
    def test_entries(self):
        p = BetaParams(1.5, 2.5)
        J, Jinv = be.fisher_beta(p)
        t = special.polygamma(1, [1.5, 2.5, 4.0])
        np.testing.assert_allclose(J, [[t[0] - t[2], -t[2]], [-t[2], t[1] - t[2]]], rtol=1e-13)
        np.testing.assert_allclose(J @ Jinv, np.eye(2), atol=1e-12)

    def test_by_finite_differences(self):
        a, b, h = 1.5, 2.5, 1e-4
        elx = special.digamma(a) - special.digamma(a + b)
        el1x = special.digamma(b) - special.digamma(a + b)

        def mean_loglik(q):
            return (q[0] - 1) * elx + (q[1] - 1) * el1x - float(special.betaln(*q))

        H = np.empty((2, 2))
        for i in range(2):
            for j in range(2):
                ei, ej = np.eye(2)[i] * h, np.eye(2)[j] * h
                q = np.array([a, b])
                H[i, j] = (mean_loglik(q + ei + ej) - mean_loglik(q + ei - ej)
                           - mean_loglik(q - ei + ej) + mean_loglik(q - ei - ej)) / (4 * h * h)
        np.testing.assert_allclose(be.fisher_beta(BetaParams(a, b))[0], -H, rtol=1e-6)


class TestEfficiency:
    def test_definition(self):
        p = BetaParams(0.4, 3.0)
        _, Jinv = be.fisher_beta(p)
        d = be.delta_matrix(p)
        np.testing.assert_allclose(be.rho1(p), Jinv[0, 0] / d[0, 0], rtol=1e-12)
        np.testing.assert_allclose(be.rho2(p), Jinv[1, 1] / d[1, 1], rtol=1e-12)

    def test_bounded_on_grid(self):
        g = np.geomspace(0.01, 100, 25)
        r = np.array([[be.rho1(BetaParams(a, b)) for b in g] for a in g])
        assert np.all((r > 0) & (r <= 1 + 1e-12))

    def test_large_alpha_limit(self):
        np.testing.assert_allclose(be.rho1(BetaParams(1e4, 1.0)), 0.964339, atol=1e-6)

    @pytest.mark.parametrize("b,a_star,r_star", TABLE_ROWS)
    def test_table_rows(self, b, a_star, r_star):
        res = be.table1_row(b)
        np.testing.assert_allclose([res.argmin, res.min_value], [a_star, r_star], atol=1e-5)

    def test_table_interior_and_csv(self):
        rows = be.table1([0.5, 2.5])
        assert all(r.interior for r in rows)
        csv = be.table1_csv(rows).splitlines()
        assert csv[0] == "beta,alpha_star,rho1_star"
        assert csv[2] == "2.5,0.333239,0.949496"

    def test_grid(self):
        g = be.table1_grid()
        assert len(g) == 200 and g[0] == 0.05 and g[-1] == 10.0 and g[59] == 3.0
        with pytest.raises(DomainError):
            be.table1_grid(1.0, 0.1, 0.5)

    def test_report(self):
        r = be.asymptotic_report(BetaParams(2.0, 3.0))
        np.testing.assert_allclose(r.delta, be.delta_matrix(r.params))
        assert r.jacobian.shape == (2, 3) and r.sigma.shape == (3, 3)


class TestStein:
    @pytest.mark.parametrize("a,b", [(1.0, 1.0), (2.0, 3.0), (0.5, 4.0)])
    @pytest.mark.parametrize("fn", ["identity", "logit", "square"])
    def test_identity(self, a, b, fn):
        from umvue.checks import STEIN_FUNCTIONS
        lhs, rhs = be.stein_identity_check(BetaParams(a, b), *STEIN_FUNCTIONS[fn])
        np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-12)

    def test_logit_covariance(self):
        lhs, rhs = be.stein_identity_check(BetaParams(2.0, 3.0), be._logit,
                                           lambda x: 1 / (x * (1 - x)))
        np.testing.assert_allclose([lhs, rhs], 0.2, rtol=1e-10)

    def test_unresolvable_edge(self):
        # w blows up at 1 where the density does too
        with pytest.raises(NonConvergence):
            be.stein_identity_check(BetaParams(3.0, 0.3), be._logit, lambda x: 1 / (x * (1 - x)))

    def test_pdf_integrates(self):
        from umvue.numkit import integrate
        np.testing.assert_allclose(integrate(lambda x: be.beta_pdf(x, BetaParams(2.0, 5.0)), 0, 1),
                                   1.0, rtol=1e-12)


class TestParams:
    def test_validation(self):
        with pytest.raises(DomainError):
            BetaParams(-1.0, 1.0)
        assert BetaParams(1.0, 2.0).swapped() == BetaParams(2.0, 1.0)
