"""Estimators and information bounds for the two-parameter Gamma model.

The density is ``lam**alpha x**(alpha-1) exp(-lam x) / Gamma(alpha)``. The
pair ``X = sum(x)``, ``Y = (geometric mean / arithmetic mean)**n`` is
complete and sufficient, and ``X`` is independent of ``Y``. The minimum
variance unbiased estimators are

* ``u0(Y)`` for ``alpha`` (``n >= 4``) and ``u1 = (n u0 - 1) / X`` for ``lam``;
* ``u2(Y)`` for ``1/alpha`` and ``u3 = X u2 / n`` for ``1/lam`` (``n >= 2``).

Closed-form competitors built from the pair kernel
``T3(x1, x2) = (x2 - x1)(log x2 - log x1) / 2`` are provided too.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import gseries
from .errors import ConfigError, DegenerateSample, DomainError, PreconditionError
from .numkit import DEFAULT_TOL, Tolerance, integrate
from .specfun import digamma, trigamma


# ---------------------------------------------------------------------------
# Data containers
# ---------------------------------------------------------------------------

def _positive(value, name):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and > 0")
    return value


@dataclass(frozen=True)
class GammaParams:
    alpha: float
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive(self.alpha, "alpha"))
        object.__setattr__(self, "lam", _positive(self.lam, "lam"))


@dataclass(frozen=True)
class GammaSample:
    data: np.ndarray

    def __post_init__(self):
        x = np.array(self.data, dtype=float).ravel()
        if x.size < 2:
            raise DomainError("a Gamma sample needs at least 2 observations")
        if not np.all(np.isfinite(x)) or np.any(x <= 0):
            raise DomainError("Gamma observations must be finite and > 0")
        x.setflags(write=False)
        object.__setattr__(self, "data", x)

    @property
    def n(self):
        return self.data.size


@dataclass(frozen=True)
class SufficientStat:
    n: int
    X: float
    logY: float

    @property
    def Y(self):
        return math.exp(self.logY)

    @property
    def mean(self):
        return self.X / self.n


def _as_sample(s):
    return s if isinstance(s, GammaSample) else GammaSample(s)


def suff_stat(s):
    """``X = sum x`` and ``log Y = n (mean log x - log mean x)``."""
    x = _as_sample(s).data
    n = x.size
    X = math.fsum(x)
    logY = n * (math.fsum(np.log(x)) / n - math.log(X / n))
    # rounding can push an all-equal sample slightly above zero
    if logY > 0 or np.all(x == x[0]):
        logY = 0.0
    return SufficientStat(n, X, logY)


def suff_stat_batch(x):
    """Vectorized :func:`suff_stat` over the last axis; returns ``(X, logY)``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    X = x.sum(axis=-1)
    logY = np.minimum(n * (np.log(x).mean(axis=-1) - np.log(X / n)), 0.0)
    return X, logY


# ---------------------------------------------------------------------------
# Minimum variance unbiased estimators
# ---------------------------------------------------------------------------

def _gfun(n, tbl):
    if tbl is not None and tbl.n != n:
        raise ConfigError(f"table built for n={tbl.n}, sample has n={n}")
    return gseries.GFunction.for_n(n, tbl)


def _check_shape_n(stat):
    if stat.n < 4:
        raise PreconditionError(
            f"no unbiased estimator of the shape exists for n = {stat.n} < 4"
        )
    if stat.n > gseries.N_MAX:
        raise ConfigError(f"n = {stat.n} exceeds n_max = {gseries.N_MAX}")
    if stat.logY == 0.0:
        raise DegenerateSample("all observations are equal (Y = 1)")


def umvue_alpha(stat, tbl=None):
    """``u0(Y) = ((n-3)/2) Y/(1-Y) - Y G'(Y)/G(Y)``, the UMVUE of ``alpha``."""
    _check_shape_n(stat)
    return float(_gfun(stat.n, tbl).score(logy=stat.logY))


def umvue_lambda(stat, tbl=None):
    """``u1 = (n u0(Y) - 1) / X``, the UMVUE of the rate."""
    return (stat.n * umvue_alpha(stat, tbl) - 1.0) / stat.X


def t2_pair(x1, x2):
    """``T2 = (x2 - x1)(log x2 - log x1) / (x1 + x2)``, unbiased for ``1/alpha``."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return (x2 - x1) * (np.log(x2) - np.log(x1)) / (x1 + x2)


def t3_pair(x1, x2):
    """``T3 = (x2 - x1)(log x2 - log x1) / 2``, unbiased for ``1/lam``."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return 0.5 * (x2 - x1) * (np.log(x2) - np.log(x1))


def _u2_closed_n2(logY):
    w = -math.expm1(logY)
    s = math.sqrt(w)
    return s * (2.0 * math.log1p(s) - logY)


def umvue_inv_alpha(stat, tbl=None, method=None, tol=DEFAULT_TOL):
    """UMVUE of ``1/alpha``:
    ``u2 = int_Y^1 x**-1 (1-x)**((n-3)/2) G(x) dx / ((1-Y)**((n-3)/2) G(Y))``.

    Parameters
    ----------
    method : {None, "quad", "fast"}
        ``"quad"`` integrates numerically in ``t = 1 - x``, which keeps the
        ``(1-x)**((n-3)/2)`` endpoint factor at the origin. ``"fast"`` uses
        the term-by-term integrated series or the Mellin inversion of
        :class:`~umvue.gseries.GFunction`. ``None`` picks the closed form
        for ``n = 2`` and ``"quad"`` otherwise.
    """
    n = stat.n
    if n > gseries.N_MAX:
        raise ConfigError(f"n = {n} exceeds n_max = {gseries.N_MAX}")
    if stat.logY == 0.0:
        return 0.0
    if method is None:
        if n == 2:
            return _u2_closed_n2(stat.logY)
        method = "quad"
    gfun = _gfun(n, tbl)
    if method == "fast":
        return float(gfun.tail_ratio(logy=stat.logY))
    if method != "quad":
        raise ConfigError(f"unknown method {method!r}")
    w = -math.expm1(stat.logY)
    log_core_Y = gfun.log_core(logy=stat.logY, w=w)

    def integrand(t):
        # x = 1 - t;  core(x) / x, scaled by core(Y) to stay O(1)
        logx = np.log1p(-t)
        return np.exp(gfun.log_core(logy=logx, w=t) - log_core_Y - logx)

    return integrate(integrand, 0.0, w, tol)


def umvue_inv_lambda(stat, tbl=None, method=None, tol=DEFAULT_TOL):
    """``u3 = (X/n) u2(Y)``, the UMVUE of ``1/lam``."""
    return stat.mean * umvue_inv_alpha(stat, tbl, method, tol)


def umvue_batch(n, X, logY, tbl=None):
    """All four estimators for many samples of size ``n`` at once.

    Uses the fast evaluation path; entries needing ``n >= 4`` are NaN
    below that size.
    """
    X = np.asarray(X, dtype=float)
    logY = np.asarray(logY, dtype=float)
    out = {k: np.full(logY.shape, np.nan) for k in ("u0", "u1", "u2", "u3")}
    degenerate = logY >= 0
    ok = ~degenerate
    if n == 2:
        s = np.sqrt(-np.expm1(logY[ok]))
        out["u2"][ok] = s * (2.0 * np.log1p(s) - logY[ok])
    else:
        res = _gfun(n, tbl).evaluate(logy=logY[ok])
        out["u2"][ok] = res["tail"]
        if n >= 4:
            out["u0"][ok] = res["score"]
            out["u1"] = (n * out["u0"] - 1.0) / X
    out["u2"][degenerate] = 0.0
    out["u3"] = X / n * out["u2"]
    return out


# ---------------------------------------------------------------------------
# Closed-form competitors
# ---------------------------------------------------------------------------

def _data(s):
    x = np.asarray(s.data if isinstance(s, GammaSample) else s, dtype=float)
    if x.shape[-1] < 2:
        raise DomainError("need at least 2 observations")
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("Gamma observations must be finite and > 0")
    return x


def yechen_inv_lambda(s):
    """``(sum x log x - mean(x) sum log x) / (n - 1)``, unbiased for ``1/lam``.

    Works on the last axis, so a 2-D array gives one value per row.
    """
    x = _data(s)
    n = x.shape[-1]
    lx = np.log(x)
    val = ((x * lx).sum(axis=-1) - x.mean(axis=-1) * lx.sum(axis=-1)) / (n - 1)
    return float(val) if np.ndim(val) == 0 else val


def yechen_inv_lambda_ustat(s):
    """The same estimator as the average of ``T3`` over all pairs (O(n^2))."""
    x = _data(s).ravel()
    i, j = np.triu_indices(x.size, k=1)
    return float(np.mean(t3_pair(x[i], x[j])))


def yechen_inv_alpha(s):
    """``yechen_inv_lambda / mean(x)``, unbiased for ``1/alpha``."""
    x = _data(s)
    val = yechen_inv_lambda(x) / x.mean(axis=-1)
    return float(val) if np.ndim(val) == 0 else val


def louzada_alpha(s):
    """Bias-corrected shape estimate built on ``a = yechen_inv_alpha``:

    ``(n-3)/((n-1) a) + 2/(5 (n + (n-1) a)) * (11/3 - 2n/(n + (n-1) a))``.
    """
    x = _data(s)
    n = x.shape[-1]
    return louzada_from_inv_alpha(yechen_inv_alpha(x), n)


def louzada_from_inv_alpha(a, n):
    a = np.asarray(a, dtype=float)
    q = n + (n - 1) * a
    val = (n - 3) / ((n - 1) * a) + 2.0 / (5.0 * q) * (11.0 / 3.0 - 2.0 * n / q)
    return float(val) if np.ndim(val) == 0 else val


# ---------------------------------------------------------------------------
# Information and efficiency
# ---------------------------------------------------------------------------

def fisher_gamma(p):
    """Per-observation Fisher information in ``(alpha, lam)`` and its inverse."""
    a, lam = p.alpha, p.lam
    t = trigamma(a)
    J = np.array([[t, -1.0 / lam], [-1.0 / lam, a / lam**2]])
    Jinv = np.array([[a, lam], [lam, lam**2 * t]]) / (a * t - 1.0)
    return J, Jinv


def cr_bound_shape(alpha, hprime, n):
    """Cramer-Rao bound for ``h(alpha)`` with ``lam`` unknown:
    ``h'**2 / (n (psi1(alpha) - 1/alpha))``."""
    a = _positive(alpha, "alpha")
    return hprime**2 / (n * (trigamma(a) - 1.0 / a))


def fisher_info_Y(alpha, n):
    """Information about ``alpha`` carried by ``Y``:
    ``J_Y = (n-1) psi1(alpha) - sum_{i=1}^{n-1} psi1(alpha + i/n)``.

    ``Y`` is a product of ``Beta(alpha, i/n)`` factors and each contributes
    ``psi1(alpha) - psi1(alpha + i/n)``.
    """
    a = _positive(alpha, "alpha")
    if n < 2:
        raise ConfigError("n must be >= 2")
    i = np.arange(1, n) / n
    return float((n - 1) * trigamma(a) - np.sum(trigamma(a + i)))


def cr_bound_sharpened(alpha, hprime, n):
    """Variance bound ``h'**2 / J_Y`` for unbiased estimators of ``h(alpha)``.

    An unbiased estimator of a function of ``alpha`` alone can be improved
    to a function of ``Y``, so the information in ``Y`` is what counts. The
    bound exceeds :func:`cr_bound_shape` for every ``n`` and the two agree
    as ``n`` grows.
    """
    return hprime**2 / fisher_info_Y(alpha, n)


def efficient_h(alpha, n, c1, c2):
    """Mean and variance of ``T = (c1/n) log Y + c2``.

    ``T`` is unbiased for ``h(alpha) = (c1/n) sum_i (psi(alpha) -
    psi(alpha + i/n)) + c2`` and its variance ``c1**2 J_Y / n**2`` equals
    ``cr_bound_sharpened(alpha, h'(alpha), n)``.
    """
    a = _positive(alpha, "alpha")
    i = np.arange(1, n) / n
    h = c1 / n * float(np.sum(digamma(a) - digamma(a + i))) + c2
    var = c1**2 * fisher_info_Y(a, n) / n**2
    return h, var


def efficient_h_prime(alpha, n, c1):
    """``h'(alpha) = c1 J_Y / n`` for the function in :func:`efficient_h`."""
    return c1 * fisher_info_Y(alpha, n) / n


def are_inv_lambda(alpha):
    """Asymptotic efficiency of ``yechen_inv_lambda``:
    ``psi1 / (alpha**2 psi1**2 - 1)``."""
    a = _positive(alpha, "alpha")
    t = trigamma(a)
    return t / (a * a * t * t - 1.0)


def are_alpha_yechen(alpha):
    """Asymptotic efficiency of ``yechen_inv_alpha`` and its reciprocal:
    ``1 / ((alpha psi1 - 1)(alpha**2 psi1 + alpha - 1))``."""
    a = _positive(alpha, "alpha")
    t = trigamma(a)
    return 1.0 / ((a * t - 1.0) * (a * a * t + a - 1.0))


# ---------------------------------------------------------------------------
# Convenience fit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaFit:
    n: int
    suffstat: SufficientStat
    umvue_alpha: float | None
    umvue_lambda: float | None
    umvue_inv_alpha: float | None
    umvue_inv_lambda: float | None
    yechen_inv_lambda: float
    yechen_inv_alpha: float
    yechen_alpha: float
    yechen_lambda: float
    louzada_alpha: float
    variance_finiteness_notes: tuple = field(default_factory=tuple)

    def as_dict(self):
        out = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "suffstat"}
        out["X"] = self.suffstat.X
        out["logY"] = self.suffstat.logY
        out["variance_finiteness_notes"] = list(self.variance_finiteness_notes)
        return out


def fit_gamma(s, tbl=None, tol=DEFAULT_TOL, n_max=gseries.N_MAX):
    """Every estimator this module offers, for one sample.

    UMVUEs needing ``n >= 4`` are ``None`` below that size, and all UMVUEs
    are ``None`` above ``n_max`` (at most ``gseries.N_MAX``). Notes on
    variance finiteness are attached as metadata and also emitted as warnings.
    """
    if not 2 <= n_max <= gseries.N_MAX:
        raise ConfigError(f"n_max must lie in [2, {gseries.N_MAX}]")
    sample = _as_sample(s)
    stat = suff_stat(sample)
    n = stat.n
    notes = []
    u0 = u1 = u2 = u3 = None
    if n <= n_max:
        if n >= 4:
            if stat.logY == 0.0:
                raise DegenerateSample("all observations are equal (Y = 1)")
            u0 = umvue_alpha(stat, tbl)
            u1 = (n * u0 - 1.0) / stat.X
        u2 = umvue_inv_alpha(stat, tbl, tol=tol)
        u3 = stat.mean * u2
    else:
        notes.append(f"n = {n} exceeds n_max = {n_max}; UMVUEs skipped")
    if n >= 4 and u0 is not None:
        if n < 6:
            notes.append("shape UMVUE has infinite variance for n < 6")
            notes.append("rate UMVUE has infinite variance for n < 6")
        elif u0 <= 2.0 / n:
            notes.append("rate UMVUE variance is finite only if alpha > 2/n; estimate is below")
        if u0 <= 1.0 / n:
            notes.append("no unbiased rate estimator exists if alpha <= 1/n; estimate is below")
    elif n < 4:
        notes.append("no unbiased shape or rate estimator exists for n < 4")
    inv_lam = yechen_inv_lambda(sample)
    inv_a = yechen_inv_alpha(sample)
    for note in notes:
        warnings.warn(note, stacklevel=2)
    return GammaFit(
        n=n,
        suffstat=stat,
        umvue_alpha=u0,
        umvue_lambda=u1,
        umvue_inv_alpha=u2,
        umvue_inv_lambda=u3,
        yechen_inv_lambda=inv_lam,
        yechen_inv_alpha=inv_a,
        yechen_alpha=1.0 / inv_a,
        yechen_lambda=1.0 / inv_lam,
        louzada_alpha=louzada_from_inv_alpha(inv_a, n),
        variance_finiteness_notes=tuple(notes),
    )
