"""Self-checks used by ``umvue verify``.

Each suite returns a list of :class:`CheckResult`. The identity suite is
deterministic and finishes in a few seconds; the Monte Carlo suites depend
only on ``reps`` and ``seed``.
"""

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import beta_est, gamma_est, gseries, mc
from .beta_est import BetaParams
from .numkit import Tolerance, integrate

# reference rows of the least-efficiency table: beta, alpha*, rho1*
TABLE1_REFERENCE = (
    (0.05, 0.179398, 0.712626),
    (0.5, 0.315422, 0.929356),
    (1.0, 0.322936, 0.949046),
    (2.5, 0.333239, 0.949496),
    (5.0, 0.352973, 0.943370),
    (10.0, 0.374822, 0.937431),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    error: float
    tolerance: float
    detail: str = ""

    def as_dict(self):
        return asdict(self)


def _check(name, error, tolerance, detail=""):
    error = float(error)
    return CheckResult(name, bool(error <= tolerance), error, tolerance, detail)


def n3_closed_form(m):
    """Exact ``(3m)! / (3**m m!)**3`` as a float."""
    num = math.factorial(3 * m)
    den = (3**m * math.factorial(m)) ** 3
    return float(Fraction(num, den))


def check_n3_coefficients(M=200):
    d = gseries.build_coeffs(3, M).d
    exact = np.array([n3_closed_form(m) for m in range(M + 1)])
    return _check("n=3 coefficients closed form", np.max(np.abs(d / exact - 1.0)), 1e-10,
                  f"m = 0..{M}")


def check_normalization(ns=(3, 4, 5, 6), alphas=(0.5, 1.0, 2.5)):
    worst = 0.0
    tol = Tolerance(rel=1e-11, abs=1e-13)
    for n in ns:
        for a in alphas:
            total = integrate(lambda y: gseries.density_Y(n, a, y), 0.0, 1.0, tol)
            worst = max(worst, abs(total - 1.0))
    return _check("density of Y integrates to 1", worst, 1e-8)


def check_identity_sum(ns=(4, 5, 6), alphas=(0.5, 1.0, 2.0)):
    worst = 0.0
    for n in ns:
        for a in alphas:
            s = gseries.identity_sum(n, a)
            target = math.exp(-math.lgamma(a) - gseries.log_K(n, a))
            worst = max(worst, abs(s / target - 1.0))
    return _check("moment identity S = 1/(Gamma(alpha) K)", worst, 1e-8)


def check_n2_closed_forms(pairs=1000, seed=0):
    rng = mc.substream(seed)
    x = rng.exponential(size=(pairs, 2)) * rng.uniform(0.2, 5.0, size=(pairs, 1))
    worst2 = worst3 = 0.0
    for x1, x2 in x:
        stat = gamma_est.suff_stat([x1, x2])
        u2 = gamma_est.umvue_inv_alpha(stat, method="quad")
        u3 = stat.mean * u2
        t2 = float(gamma_est.t2_pair(x1, x2))
        t3 = float(gamma_est.t3_pair(x1, x2))
        worst2 = max(worst2, abs(u2 - t2) / max(abs(t2), 1.0))
        worst3 = max(worst3, abs(u3 - t3) / max(abs(t3), 1.0))
    return [
        _check("n=2 integral u2 equals T2", worst2, 1e-10, f"{pairs} pairs"),
        _check("n=2 integral u3 equals T3", worst3, 1e-10, f"{pairs} pairs"),
    ]


def check_delta(grid=np.linspace(0.2, 8.0, 10)):
    worst = v_sq = 0.0
    v12_min = math.inf
    for a in grid:
        for b in grid:
            p = BetaParams(a, b)
            d = beta_est.delta_matrix(p)
            worst = max(worst, np.max(np.abs(beta_est.delta_via_jacobian(p) - d) / np.abs(d)))
            v12_min = min(v12_min, d[0, 1])
            v11, v12, v22 = d.ravel()[[0, 1, 3]] * (a + b + 1.0)
            alt = (v11 + v22 + 2 * v12) / ((a + b) ** 4 * (a + b + 1.0))
            v_sq = max(v_sq, abs(beta_est.v_sq_un(p) - alt) / alt)
    return [
        _check("Delta equals A0 Sigma A0^T", worst, 1e-10, "10 x 10 grid on [0.2, 8]^2"),
        _check("Delta off-diagonal positive", 0.0 if v12_min > 0 else 1.0, 0.0,
               f"smallest v12 / (a+b+1) = {v12_min:.3g}"),
        _check("v^2 reduction of Delta entries", v_sq, 1e-12),
    ]


STEIN_FUNCTIONS = {
    "identity": (lambda x: x, lambda x: np.ones_like(x)),
    "logit": (lambda x: np.log(x) - np.log1p(-x), lambda x: 1.0 / (x * (1.0 - x))),
    "square": (lambda x: x * x, lambda x: 2.0 * x),
}


def check_stein(points=((1.0, 1.0), (2.0, 3.0), (0.5, 4.0))):
    worst = 0.0
    for a, b in points:
        for w, dw in STEIN_FUNCTIONS.values():
            lhs, rhs = beta_est.stein_identity_check(BetaParams(a, b), w, dw)
            worst = max(worst, abs(lhs - rhs))
    return _check("Stein covariance identity", worst, 1e-8)


def check_sharpened_bound(alphas=(0.3, 1.0, 3.0), ns=(4, 10, 50)):
    gap = math.inf
    eq = 0.0
    for a in alphas:
        for n in ns:
            gap = min(gap, gamma_est.cr_bound_sharpened(a, 1.0, n) - gamma_est.cr_bound_shape(a, 1.0, n))
            _, var = gamma_est.efficient_h(a, n, 1.0, 0.0)
            bound = gamma_est.cr_bound_sharpened(a, gamma_est.efficient_h_prime(a, n, 1.0), n)
            eq = max(eq, abs(var - bound) / bound)
    return [
        _check("sharpened bound exceeds Cramer-Rao", 0.0 if gap > 0 else 1.0, 0.0,
               f"smallest gap {gap:.3g}"),
        _check("efficient h attains the sharpened bound", eq, 1e-12),
    ]


def check_table1():
    worst = 0.0
    for b, a_ref, r_ref in TABLE1_REFERENCE:
        res = beta_est.table1_row(b)
        worst = max(worst, abs(res.argmin - a_ref), abs(res.min_value - r_ref))
    return _check("least-efficiency table reference rows", worst, 1e-5)


def identities():
    out = [check_n3_coefficients(), check_normalization(), check_identity_sum()]
    out += check_n2_closed_forms()
    out += check_delta()
    out += [check_stein()]
    out += check_sharpened_bound()
    out += [check_table1()]
    return out


UNBIASEDNESS_SPECS = (
    dict(estimator="umvue_alpha", alpha=2.0, lam=1.0, n=6),
    dict(estimator="umvue_lambda", alpha=2.0, lam=3.0, n=6),
    dict(estimator="umvue_inv_alpha", alpha=2.0, lam=1.0, n=5),
    dict(estimator="umvue_inv_lambda", alpha=1.0, lam=2.0, n=4),
    dict(estimator="beta_u_stat", alpha=2.0, beta=3.0, n=10),
)


def unbiasedness(reps=100_000, seed=42):
    out = []
    for kw in UNBIASEDNESS_SPECS:
        rep = mc.run_experiment(mc.ExperimentSpec(reps=reps, seed=seed, **kw))
        out.append(CheckResult(
            f"{kw['estimator']} unbiased (n={kw['n']})", rep.passed, abs(rep.z_score), rep.threshold,
            f"mean {rep.estimate_mean:.6g} target {rep.target:.6g} se {rep.estimate_se:.3g}",
        ))
    return out


def clt(reps=2000, seed=42, n=5000):
    rep = mc.run_beta_clt(BetaParams(2.0, 3.0), n, reps, seed)
    return [CheckResult("beta estimators CLT covariance", rep.passed, rep.estimate_mean,
                        rep.threshold, rep.notes[0])]


SUITES = ("identities", "unbiasedness", "clt", "all")


def run_suite(name, reps=None, seed=42):
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    out = []
    if name in ("identities", "all"):
        out += identities()
    if name in ("unbiasedness", "all"):
        out += unbiasedness(reps or 100_000, seed)
    if name in ("clt", "all"):
        out += clt(reps or 2000, seed)
    return out
