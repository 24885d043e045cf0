"""Adaptive quadrature, bracketed scalar minimization and series summation.

All three routines share the :class:`Tolerance` record and raise
:class:`~umvue.errors.NonConvergence` instead of returning a value that does
not meet the requested tolerance.
"""

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NonConvergence

SERIES_MAX_ITER = 10**6
MINIMIZE_MAX_ITER = 200
QUAD_MAX_DEPTH = 60
QUAD_MAX_PANELS = 20000


@dataclass(frozen=True)
class Tolerance:
    """Stopping rule: ``err <= max(abs, rel * |value|)``.

    ``max_iter=None`` selects the routine's own default (series terms,
    minimizer iterations, or quadrature bisection depth).
    """

    rel: float = 1e-10
    abs: float = 1e-12
    max_iter: int | None = None

    def __post_init__(self):
        if self.rel < 0 or self.abs < 0 or self.rel + self.abs <= 0:
            raise ConfigError("need rel >= 0, abs >= 0 and rel + abs > 0")
        if self.max_iter is not None and self.max_iter < 1:
            raise ConfigError("max_iter must be a positive integer")

    def bound(self, value):
        return max(self.abs, self.rel * abs(value))


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class MinResult:
    argmin: float
    min_value: float
    iterations: int
    converged: bool
    bracket: tuple = (math.nan, math.nan)


# ---------------------------------------------------------------------------
# Quadrature: Gauss-Kronrod 7/15 with global adaptive bisection
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


_HALF_PI = 0.5 * math.pi
# 2 * pi/2 * sinh(T) = 600, so the Jacobian at +-T is about exp(-600)
_T_MAX = math.asinh(600.0 / math.pi)
_INITIAL_PANELS = 8


def _call(f, x):
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(f(float(xi))) for xi in x])


def _gk15(g, a, b):
    half = 0.5 * (b - a)
    u = 0.5 * (a + b) + half * _NODES
    v = g(u)
    k = half * np.dot(_WK, v)
    gauss = half * np.dot(_WG15, v)
    return k, abs(k - gauss)


def integrate(f, lo, hi, tol=DEFAULT_TOL):
    """Integrate a vectorized ``f`` over the open interval ``(lo, hi)``.

    The interval is mapped onto ``t`` in ``[-T, T]`` by the tanh-sinh
    substitution ``x = lo + (hi - lo) * (1 + tanh(pi/2 * sinh t)) / 2``.
    Its Jacobian decays double-exponentially, so algebraic endpoint
    behaviour ``(x - lo)^p`` or ``(hi - x)^p`` with ``p > -1`` becomes a
    smooth, rapidly vanishing integrand in ``t``, which is then handled by
    adaptive Gauss-Kronrod 7/15 bisection. ``f`` is never evaluated at
    ``lo`` or ``hi`` unless the abscissa rounds onto them.

    Near a nonzero endpoint abscissae are limited by the spacing of
    doubles there, and the mass of the last unreachable cell is added to
    the error estimate. A singular factor ``(hi - x)^p`` with ``hi != 0``
    should therefore be reflected by the caller, ``t = hi - x``, so that it
    sits at zero.

    Parameters
    ----------
    f : callable
        Maps an ndarray of abscissae to an ndarray of values. Scalar-only
        callables also work, at a speed cost.
    lo, hi : float
        Finite limits with ``lo < hi``.
    tol : Tolerance
        ``max_iter`` caps the bisection depth (default 60).

    Returns
    -------
    float

    Raises
    ------
    NonConvergence
        If the error estimate cannot be pushed below tolerance or ``f`` is
        not finite at an abscissa.
    """
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ConfigError("integrate needs finite lo < hi")
    max_depth = tol.max_iter or QUAD_MAX_DEPTH
    width = hi - lo
    inner_lo = np.nextafter(lo, hi)
    inner_hi = np.nextafter(hi, lo)

    def g(t):
        z = _HALF_PI * np.sinh(t)
        # distances to the nearer endpoint, computed without cancellation
        e = np.exp(-2.0 * np.abs(z))
        near = width * e / (1.0 + e)
        x = np.where(z < 0, lo + near, hi - near)
        # keep abscissae strictly inside the interval
        x = np.clip(x, inner_lo, inner_hi)
        jac = width * _HALF_PI * np.cosh(t) * 2.0 * e / (1.0 + e) ** 2
        vals = _call(f, x) * jac
        if not np.all(np.isfinite(vals)):
            bad = x[~np.isfinite(vals)]
            raise NonConvergence(
                "integrand not finite on (lo, hi)", lo=lo, hi=hi, at=bad.tolist()
            )
        return vals

    edges = np.linspace(-_T_MAX, _T_MAX, _INITIAL_PANELS + 1)
    heap = []
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = _gk15(g, a, b)
        heap.append((-e, a, b, v, 0))
    heapq.heapify(heap)
    total = math.fsum(h[3] for h in heap)
    # the integrand in t decays faster than exponentially beyond +-T, so its
    # size at the cut bounds the discarded tails
    cut = g(np.array([-_T_MAX, _T_MAX]))
    tail = float(np.sum(np.abs(cut)))
    # next to a nonzero endpoint the abscissae cannot get closer than one
    # ulp; charge the mass of that last cell to the error
    for end, inner in ((lo, inner_lo), (hi, inner_hi)):
        if end != 0.0:
            edge = abs(float(_call(f, np.array([inner]))[0])) * abs(end - inner)
            tail += edge if math.isfinite(edge) else math.inf
    heap.append((-tail, _T_MAX, _T_MAX, 0.0, max_depth))
    heapq.heapify(heap)
    err = math.fsum(-h[0] for h in heap)
    done_vals, done_errs = [], []
    err_sum = err
    while True:
        if err_sum <= tol.bound(total):
            break
        if not heap or len(heap) + len(done_vals) > QUAD_MAX_PANELS:
            raise NonConvergence(
                "quadrature did not reach tolerance",
                partial=total, error=err_sum, lo=lo, hi=hi,
            )
        neg_err, a, b, val, depth = heapq.heappop(heap)
        if depth >= max_depth:
            done_vals.append(val)
            done_errs.append(-neg_err)
            continue
        mid = 0.5 * (a + b)
        v1, e1 = _gk15(g, a, mid)
        v2, e2 = _gk15(g, mid, b)
        heapq.heappush(heap, (-e1, a, mid, v1, depth + 1))
        heapq.heappush(heap, (-e2, mid, b, v2, depth + 1))
        total += v1 + v2 - val
        err_sum += e1 + e2 + neg_err
        if len(heap) % 64 == 0:
            # refresh the running sums to stop rounding drift
            total = math.fsum([h[3] for h in heap] + done_vals)
            err_sum = math.fsum([-h[0] for h in heap] + done_errs)
    return math.fsum([h[3] for h in heap] + done_vals)


# ---------------------------------------------------------------------------
# Minimization: Brent's method on a fixed bracket
# ---------------------------------------------------------------------------

_GOLD = 0.5 * (3.0 - math.sqrt(5.0))


def minimize_scalar(f, lo, hi, tol=Tolerance(rel=0.0, abs=1e-8)):
    """Minimize ``f`` on ``[lo, hi]`` by golden-section and parabolic steps.

    The search stops once the bracket that must contain the minimizer is no
    wider than ``tol.abs``. The endpoints themselves are never evaluated, so
    a caller who cares about boundary minima should compare ``f(lo)`` and
    ``f(hi)`` with the returned value. When several evaluated points share
    the minimum value, the leftmost one is returned.

    Raises
    ------
    NonConvergence
        After ``tol.max_iter`` iterations (default 200).
    """
    a, b = float(lo), float(hi)
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise ConfigError("minimize_scalar needs finite lo < hi")
    if tol.abs <= 0:
        raise ConfigError("minimize_scalar needs tol.abs > 0")
    max_iter = tol.max_iter or MINIMIZE_MAX_ITER
    eps = np.finfo(float).eps

    x = w = v = a + _GOLD * (b - a)
    fx = fw = fv = float(f(x))
    seen = [(x, fx)]
    d = e = 0.0
    for it in range(1, max_iter + 1):
        m = 0.5 * (a + b)
        tol1 = max(0.25 * tol.abs, 2 * eps * abs(x))
        tol2 = 2.0 * tol1
        if abs(x - m) <= tol2 - 0.5 * (b - a):
            best = min(fx, *(fy for _, fy in seen))
            arg = min(xs for xs, fy in seen if fy == best and a <= xs <= b)
            return MinResult(arg, best, it - 1, True, (a, b))
        use_golden = True
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0:
                p = -p
            q = abs(q)
            if abs(p) < abs(0.5 * q * e) and q * (a - x) < p < q * (b - x):
                e, d = d, p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if m >= x else -tol1
                use_golden = False
        if use_golden:
            e = (a - x) if x >= m else (b - x)
            d = _GOLD * e
        u = x + (d if abs(d) >= tol1 else math.copysign(tol1, d))
        fu = float(f(u))
        seen.append((u, fu))
        if fu < fx:
            if u >= x:
                a = x
            else:
                b = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    raise NonConvergence(
        "minimizer exhausted its iteration budget", partial=x, bracket=(a, b)
    )


# ---------------------------------------------------------------------------
# Series summation
# ---------------------------------------------------------------------------

RUN_LENGTH = 5


def sum_series(term, tol=DEFAULT_TOL, start=0):
    """Sum ``term(start) + term(start + 1) + ...``.

    Summation stops after ``RUN_LENGTH`` consecutive terms satisfy
    ``|t| <= max(abs, rel * |partial sum|)``.

    Raises
    ------
    NonConvergence
        If that never happens within ``tol.max_iter`` terms (default 10**6)
        or a term is not finite. ``partial`` holds the sum so far.
    """
    max_iter = tol.max_iter or SERIES_MAX_ITER
    total = 0.0
    comp = 0.0
    run = 0
    for k in range(start, start + max_iter):
        t = float(term(k))
        if not math.isfinite(t):
            raise NonConvergence("series term is not finite", partial=total, index=k)
        # Kahan-Babuska summation
        s = total + t
        if abs(total) >= abs(t):
            comp += (total - s) + t
        else:
            comp += (t - s) + total
        total = s
        if abs(t) <= tol.bound(total + comp):
            run += 1
            if run >= RUN_LENGTH:
                return total + comp
        else:
            run = 0
    raise NonConvergence(
        "series did not converge", partial=total + comp, terms=max_iter
    )
