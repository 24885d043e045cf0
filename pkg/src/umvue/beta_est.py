"""Closed-form estimators and asymptotics for the Beta(alpha, beta) model.

With ``L(x) = log(x / (1 - x))`` the Stein covariance identity gives
``Cov(X, L(X)) = 1 / (alpha + beta)``. The sample version

    V_n = (sum x L(x) - mean(x) sum L(x)) / n

is a scaled U-statistic with the positive pair kernel :func:`stein_kernel`,
and it yields the moment-type estimators ``alpha_hat = mean(x) / V_n`` and
``beta_hat = (1 - mean(x)) / V_n``. Their joint limit is normal with
covariance ``Delta`` (see :func:`delta_matrix`), obtained by the delta
method from the moments of ``(X, L(X), X L(X))``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSample, DomainError, SingularityError
from .numkit import MinResult, Tolerance, integrate, minimize_scalar
from .specfun import digamma, log_beta, trigamma

TABLE1_BRACKET = (1e-4, 1.0)
TABLE1_TOL = Tolerance(rel=0.0, abs=1e-8)
_BELOW_ONE = np.nextafter(1.0, 0.0)


def _positive(value, name):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and > 0")
    return value


@dataclass(frozen=True)
class BetaParams:
    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive(self.alpha, "alpha"))
        object.__setattr__(self, "beta", _positive(self.beta, "beta"))

    def swapped(self):
        return BetaParams(self.beta, self.alpha)


def _open_unit(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0) or np.any(x >= 1):
        raise DomainError("Beta observations must lie strictly inside (0, 1)")
    return x


@dataclass(frozen=True)
class BetaSample:
    data: np.ndarray

    def __post_init__(self):
        x = np.array(self.data, dtype=float).ravel()
        if x.size < 2:
            raise DomainError("a Beta sample needs at least 2 observations")
        _open_unit(x)
        x.setflags(write=False)
        object.__setattr__(self, "data", x)

    @property
    def n(self):
        return self.data.size


@dataclass(frozen=True)
class BetaFit:
    n: int
    alpha_hat: float
    beta_hat: float
    u_stat: float
    v_stat: float
    se_alpha: float
    se_beta: float

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class AsymptoticReport:
    params: BetaParams
    mu: np.ndarray
    sigma: np.ndarray
    jacobian: np.ndarray
    delta: np.ndarray
    rho1: float
    rho2: float
    v_sq: float
    fisher: np.ndarray
    fisher_inv: np.ndarray


# ---------------------------------------------------------------------------
# Kernel and estimators
# ---------------------------------------------------------------------------

def stein_kernel(x1, x2):
    """Pair kernel ``(x2 - x1) log[x2 (1 - x1) / (x1 (1 - x2))] / 2``.

    Nonnegative, zero only on the diagonal, and unbiased for
    ``1 / (alpha + beta)``. Accepts broadcastable arrays.
    """
    x1 = _open_unit(x1)
    x2 = _open_unit(x2)
    logit_gap = (np.log(x2) - np.log1p(-x2)) - (np.log(x1) - np.log1p(-x1))
    val = 0.5 * (x2 - x1) * logit_gap
    return float(val) if np.ndim(val) == 0 else val


def _logit(x):
    return np.log(x) - np.log1p(-x)


def fit_beta_batch(x):
    """``(alpha_hat, beta_hat, U_n, V_n)`` for each row of ``x``.

    Rows with ``V_n = 0`` produce ``nan`` estimates rather than raising.
    """
    x = _open_unit(x)
    n = x.shape[-1]
    lx = _logit(x)
    xbar = x.mean(axis=-1)
    # centred form: exactly zero for a constant row
    v = ((x - xbar[..., None]) * (lx - lx.mean(axis=-1)[..., None])).sum(axis=-1) / n
    with np.errstate(divide="ignore", invalid="ignore"):
        safe_v = np.where(v > 0, v, np.nan)
        a = xbar / safe_v
        b = (1.0 - xbar) / safe_v
    return a, b, n * v / (n - 1), v


def fit_beta(s):
    """Closed-form estimates with plug-in standard errors from ``Delta``.

    Raises
    ------
    DegenerateSample
        If ``V_n`` is not positive, which happens when every observation
        is equal or the spread is lost to rounding.
    """
    sample = s if isinstance(s, BetaSample) else BetaSample(s)
    x = sample.data
    n = sample.n
    lx = _logit(x)
    xbar = math.fsum(x) / n
    v = math.fsum((x - xbar) * (lx - math.fsum(lx) / n)) / n
    if not v > 0:
        raise DegenerateSample("V_n is zero to rounding; the observations are (nearly) all equal")
    a_hat = xbar / v
    b_hat = (1.0 - xbar) / v
    d = delta_matrix(BetaParams(a_hat, b_hat))
    return BetaFit(
        n=n,
        alpha_hat=a_hat,
        beta_hat=b_hat,
        u_stat=n * v / (n - 1),
        v_stat=v,
        se_alpha=math.sqrt(d[0, 0] / n),
        se_beta=math.sqrt(d[1, 1] / n),
    )


# ---------------------------------------------------------------------------
# Asymptotic moments and the delta method
# ---------------------------------------------------------------------------

def moments_xyz(p):
    """Mean vector and covariance of ``(X, L(X), X L(X))`` under Beta(p)."""
    a, b = p.alpha, p.beta
    s = a + b
    psi = digamma(a) - digamma(b)
    psi1 = trigamma(a) + trigamma(b)
    mu = np.array([a, s * psi, 1.0 + a * psi]) / s
    c = s * s * (s + 1.0)
    s11 = a * b / c
    s12 = 1.0 / s
    s13 = (b + a * s + a * b * psi) / c
    s22 = psi1
    s23 = (psi + a * psi1) / s
    s33 = (a * b * psi**2 + 2.0 * (a * a + a * b + b) * psi
           + a * (a + 1.0) * s * psi1 + s - 1.0) / c
    sigma = np.array([[s11, s12, s13], [s12, s22, s23], [s13, s23, s33]])
    return mu, sigma


def k_maps(mu):
    """``(k1, k2) = (x, 1 - x) / (z - x y)``; these send the moments to ``(alpha, beta)``."""
    x, y, z = mu
    den = z - x * y
    if den == 0:
        raise SingularityError("z - x y = 0")
    return np.array([x / den, (1.0 - x) / den])


def jacobian_A0(mu):
    """Jacobian of :func:`k_maps` at ``mu``, a 2 x 3 matrix."""
    x, y, z = (float(t) for t in mu)
    den = x * y - z
    if den == 0:
        raise SingularityError("Jacobian undefined where x y = z")
    return np.array([[z, x * x, -x], [y - z, x - x * x, x - 1.0]]) / den**2


def _v_entries(a, b):
    psi1 = trigamma(a) + trigamma(b)
    s1 = a + b + 1.0
    v11 = a * (a * s1 + a * a * b * psi1 - b)
    v12 = a * a * b + a * b * b + a * a * b * b * psi1 - a * a - b * b
    v22 = b * (b * s1 + a * b * b * psi1 - a)
    return v11, v12, v22


def delta_matrix(p):
    """Asymptotic covariance of ``sqrt(n) (alpha_hat - alpha, beta_hat - beta)``."""
    a, b = p.alpha, p.beta
    v11, v12, v22 = _v_entries(a, b)
    return np.array([[v11, v12], [v12, v22]]) / (a + b + 1.0)


def delta_via_jacobian(p):
    """``A0 Sigma A0^T``, the same matrix as :func:`delta_matrix` built from its parts."""
    mu, sigma = moments_xyz(p)
    A = jacobian_A0(mu)
    return A @ sigma @ A.T


def v12_positive_form(p):
    """``alpha^2 beta^2 (q(alpha) + q(beta))`` with ``q(x) = psi1(x) - 1/x^2 + 1/x``.

    Equal to the off-diagonal ``v12``; each ``q`` is positive.
    """
    a, b = p.alpha, p.beta

    def q(x):
        return trigamma(x) - (1.0 / x**2 - 1.0 / x)

    return a * a * b * b * (q(a) + q(b))


# ---------------------------------------------------------------------------
# Information and efficiency
# ---------------------------------------------------------------------------

def fisher_beta(p):
    """Per-observation Fisher information ``J`` and its inverse."""
    ta, tb, ts = trigamma(p.alpha), trigamma(p.beta), trigamma(p.alpha + p.beta)
    J = np.array([[ta - ts, -ts], [-ts, tb - ts]])
    det = ta * tb - ts * (ta + tb)
    Jinv = np.array([[tb - ts, ts], [ts, ta - ts]]) / det
    return J, Jinv


def _rho1(a, b):
    ta, tb, ts = trigamma(a), trigamma(b), trigamma(a + b)
    det = ta * tb - ts * (ta + tb)
    bracket = a * (a + b + 1.0) + a * a * b * (ta + tb) - b
    return (a + b + 1.0) * (tb - ts) / a / (bracket * det)


def rho1(p):
    """Asymptotic efficiency of ``alpha_hat``: ``(J^{-1})_{11} / Delta_{11}``."""
    return _rho1(p.alpha, p.beta)


def rho2(p):
    """Asymptotic efficiency of ``beta_hat``, i.e. ``rho1`` with the roles swapped."""
    return _rho1(p.beta, p.alpha)


def v_sq_un(p):
    """Asymptotic variance of ``sqrt(n) (U_n - 1/(alpha + beta))``."""
    a, b = p.alpha, p.beta
    s = a + b
    return (s + a * b * (trigamma(a) + trigamma(b)) - 1.0) / (s * s * (s + 1.0))


def v_sq_inv_vn(p):
    """Asymptotic variance of ``sqrt(n) (1/V_n - (alpha + beta))``, i.e. ``(alpha+beta)^4 v^2``."""
    return (p.alpha + p.beta) ** 4 * v_sq_un(p)


def asymptotic_report(p):
    mu, sigma = moments_xyz(p)
    J, Jinv = fisher_beta(p)
    return AsymptoticReport(
        params=p,
        mu=mu,
        sigma=sigma,
        jacobian=jacobian_A0(mu),
        delta=delta_matrix(p),
        rho1=rho1(p),
        rho2=rho2(p),
        v_sq=v_sq_un(p),
        fisher=J,
        fisher_inv=Jinv,
    )


# ---------------------------------------------------------------------------
# Least efficiency over alpha
# ---------------------------------------------------------------------------

def table1_row(beta, tol=TABLE1_TOL):
    """Minimize ``alpha -> rho1(alpha, beta)`` over ``(1e-4, 1)``.

    The returned ``MinResult`` holds ``alpha*`` and ``rho1*``; its bracket
    width is at most ``tol.abs``.
    """
    b = _positive(beta, "beta")
    return minimize_scalar(lambda a: _rho1(a, b), *TABLE1_BRACKET, tol=tol)


@dataclass(frozen=True)
class Table1Row:
    beta: float
    alpha_star: float
    rho1_star: float
    interior: bool


def table1(betas, tol=TABLE1_TOL):
    """One :class:`Table1Row` per ``beta``.

    ``interior`` is False when ``rho1`` at the minimizer is not below its
    values at both bracket ends, which would mean the minimum sits on an
    edge of the search interval.
    """
    rows = []
    lo, hi = TABLE1_BRACKET
    for b in betas:
        res = table1_row(b, tol)
        interior = res.min_value < min(_rho1(lo, float(b)), _rho1(hi, float(b)))
        rows.append(Table1Row(float(b), res.argmin, res.min_value, bool(interior)))
    return rows


def table1_grid(lo=0.05, step=0.05, hi=10.0):
    """``lo, lo + step, ..., hi`` computed by index to avoid drift."""
    if not (lo > 0 and step > 0 and hi >= lo):
        raise DomainError("grid needs 0 < lo <= hi and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 12) for k in range(count)]


def table1_csv(rows):
    lines = ["beta,alpha_star,rho1_star"]
    lines += [f"{r.beta:g},{r.alpha_star:.6f},{r.rho1_star:.6f}" for r in rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Stein covariance identity
# ---------------------------------------------------------------------------

def beta_pdf(x, p, one_minus_x=None):
    """Beta density; pass ``one_minus_x`` to keep precision next to 1."""
    x = np.asarray(x, dtype=float)
    s = 1.0 - x if one_minus_x is None else np.asarray(one_minus_x, dtype=float)
    a, b = p.alpha, p.beta
    return np.exp((a - 1.0) * np.log(x) + (b - 1.0) * np.log(s) - log_beta(a, b))


def _beta_expectation(h, p, tol):
    """``E h(X)`` for ``h(x, 1 - x)``; the upper half is integrated in ``1 - x``."""
    left = integrate(lambda x: h(x, 1.0 - x) * beta_pdf(x, p, 1.0 - x), 0.0, 0.5, tol)

    def upper(s):
        # the density sees the exact 1 - x; h gets x held just below 1
        x = np.minimum(1.0 - s, _BELOW_ONE)
        return h(x, s) * beta_pdf(x, p, s)

    right = integrate(upper, 0.0, 0.5, tol)
    return left + right


def stein_identity_check(p, w, w_deriv, tol=Tolerance(rel=1e-12, abs=1e-14)):
    """Both sides of ``Cov(X, w(X)) = E[X (1 - X) w'(X)] / (alpha + beta)``.

    Each side is computed by quadrature against the Beta density; the
    covariance is taken as ``E[(X - mean) w(X)]``. ``w`` and ``w_deriv``
    receive arrays of points in ``(0, 1)``.

    Raises
    ------
    NonConvergence
        If an integrand cannot be resolved, for instance when ``w`` is
        unbounded at 1 and ``beta < 1``, so that mass within one ulp of 1
        matters.
    """
    mean = p.alpha / (p.alpha + p.beta)
    lhs = _beta_expectation(lambda x, s: (x - mean) * w(x), p, tol)
    rhs = _beta_expectation(lambda x, s: x * s * w_deriv(x), p, tol)
    return lhs, rhs / (p.alpha + p.beta)


__all__ = [
    "AsymptoticReport", "BetaFit", "BetaParams", "BetaSample", "MinResult",
    "Table1Row", "asymptotic_report", "beta_pdf", "delta_matrix",
    "delta_via_jacobian", "fisher_beta", "fit_beta", "fit_beta_batch",
    "jacobian_A0", "k_maps", "moments_xyz", "rho1", "rho2", "stein_identity_check",
    "stein_kernel", "table1", "table1_csv", "table1_grid", "table1_row",
    "v12_positive_form", "v_sq_inv_vn", "v_sq_un",
]
