"""Series G(y), its coefficients, and the density of the shape statistic Y.

For a Gamma sample of size ``n`` the statistic ``Y = (geometric mean /
arithmetic mean)**n`` is distributed as a product of independent
``Beta(alpha, i/n)`` variables, ``i = 1..n-1``, with density

    f_Y(y) = K(alpha) * y**(alpha-1) * (1-y)**((n-3)/2) * G(y),

    G(y) = sum_m d_m (1-y)**m.

The coefficients come from an (n-2)-step convolution recursion. Each level
is scaled by a constant so that its leading coefficient is 1, which gives
``G(1-) = d_0 = 1`` for every ``n`` and, for ``n = 3``,
``d_m = (3m)! / (3**m m!)**3``. The unscaled leading coefficients are kept
in ``CoeffTable.log_scale``.

Throughout, ``core(y) = (1-y)**((n-3)/2) * G(y)`` is the alpha-free part of
the density. Its Mellin transform is

    int_0^1 y**(z-1) core(y) dy = Gamma((n-1)/2) * M(z),
    M(z) = Gamma(z)**(n-1) / prod_i Gamma(z + i/n)
         = Gamma(z)**n / ((2 pi)**((n-1)/2) * n**(1/2 - n z) * Gamma(n z)),

the second line by Gauss's multiplication formula. Near ``y = 0`` the power
series converges too slowly, so :class:`GFunction` inverts this transform
numerically along a hyperbolic contour through the saddle point instead.
"""

import glob
import math
import os
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, loggamma, psi

from .errors import ConfigError, DomainError, NonConvergence, NumericalOverflow
from .numkit import DEFAULT_TOL, Tolerance, sum_series

N_MAX = 64
M_MAX = 20000
Y_MIN = 0.02


# ---------------------------------------------------------------------------
# Coefficient table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoeffTable:
    """Recursion levels ``gamma_i(m)``, ``i = 1..n-1``, ``m = 0..M``.

    Attributes
    ----------
    n, M : int
    levels : ndarray, shape (n-1, M+1)
        Row ``i-1`` holds level ``i``, scaled so that ``levels[i-1, 0] == 1``.
    log_scale : ndarray, shape (n-1,)
        Log of the unscaled leading coefficient of each level, so the
        unscaled recursion is ``exp(log_scale[:, None]) * levels``.
    y_min : float
        Smallest ``y`` at which the stored terms meet the truncation test.
    """

    n: int
    M: int
    levels: np.ndarray = field(repr=False)
    log_scale: np.ndarray = field(repr=False)
    y_min: float = Y_MIN

    def __post_init__(self):
        self.levels.setflags(write=False)
        self.log_scale.setflags(write=False)

    @property
    def d(self):
        return self.levels[-1]

    def level(self, i):
        """Coefficients ``gamma_i(m)`` for ``1 <= i <= n-1``."""
        if not 1 <= i <= self.n - 1:
            raise ConfigError(f"level must lie in 1..{self.n - 1}")
        return self.levels[i - 1]


def _check_n(n, n_max=N_MAX):
    if int(n) != n or n < 2:
        raise ConfigError("n must be an integer >= 2")
    if n > n_max:
        raise ConfigError(f"n = {n} exceeds n_max = {n_max}")
    return int(n)


def level_log_scale(n):
    """Log of ``gamma_j(0)`` in the unscaled recursion, ``j = 1..n-1``.

    The factors telescope to ``prod_{i<=j} Gamma(i/n) / Gamma(j(j+1)/(2n))``.
    """
    j = np.arange(1, n)
    return np.cumsum(gammaln(j / n)) - gammaln(j * (j + 1) / (2 * n))


def _recurse(n, M):
    m = np.arange(M + 1, dtype=float)
    levels = np.zeros((n - 1, M + 1))
    levels[0, 0] = 1.0
    g = levels[0]
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, n - 1):
            a = i * (i + 1) / (2 * n)
            b = (i + 1) * (i + 2) / (2 * n)
            s = (i + 1) / n
            # (s)_j / j!  and  (a)_m / (b)_m, each built from log-gamma differences
            c = np.exp(gammaln(m + s) - gammaln(s) - gammaln(m + 1))
            r = np.exp(gammaln(m + a) - gammaln(a) - gammaln(m + b) + gammaln(b))
            g = r * np.convolve(c, g)[: M + 1]
            if not np.all(np.isfinite(g)):
                raise NumericalOverflow(f"level {i + 1} overflowed", n=n, M=M)
            levels[i] = g
    return levels


def _tail_ok(d, y, rel):
    """True when the terms beyond the table are negligible at ``y``."""
    w = 1.0 - y
    m = np.arange(d.size)
    with np.errstate(under="ignore"):
        terms = d * np.exp(m * math.log(w))
    tail = terms[-1] * w / (1.0 - w)
    return tail <= rel * terms.sum()


def build_coeffs(n, M=None, *, y_min=Y_MIN, tol=DEFAULT_TOL, n_max=N_MAX, M_max=M_MAX):
    """Run the coefficient recursion.

    Parameters
    ----------
    n : int
        Sample size, ``2 <= n <= n_max``.
    M : int, optional
        Truncation order. When omitted, ``M`` is doubled from 64 until the
        truncated tail at ``y_min`` is below ``tol.rel`` of the sum, up to
        ``M_max``.

    Returns
    -------
    CoeffTable
    """
    n = _check_n(n, n_max)
    if M is not None:
        if int(M) != M or not 0 <= M <= M_max:
            raise ConfigError(f"M must be an integer in [0, {M_max}]")
        levels = _recurse(n, int(M))
        return CoeffTable(n, int(M), levels, level_log_scale(n), _reach(levels[-1], tol))
    if not 0 < y_min < 1:
        raise ConfigError("y_min must lie in (0, 1)")
    size = 64
    while True:
        levels = _recurse(n, size)
        if n == 2 or _tail_ok(levels[-1], y_min, tol.rel) or size >= M_max:
            return CoeffTable(n, size, levels, level_log_scale(n), _reach(levels[-1], tol))
        size = min(2 * size, M_max)


def _reach(d, tol):
    """Smallest y on a coarse grid at which the table passes the tail test."""
    if d.size > 1 and d[1] == 0.0:
        return 0.0
    for y in np.geomspace(1e-4, 0.9, 200):
        if _tail_ok(d, y, tol.rel):
            return float(y)
    return 1.0


# ---------------------------------------------------------------------------
# Binary cache
# ---------------------------------------------------------------------------

_MAGIC = b"GCT1"
_HEADER = struct.Struct("<4sII")


def save_table(tbl, path):
    """Write ``tbl`` as a GCT1 file: header then ``(n-1)*(M+1)`` doubles."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, tbl.n, tbl.M))
        fh.write(np.ascontiguousarray(tbl.levels, dtype="<f8").tobytes())


def load_table(path, tol=DEFAULT_TOL):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ConfigError(f"{path}: truncated header")
    magic, n, M = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ConfigError(f"{path}: not a GCT1 file")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if body.size != (n - 1) * (M + 1):
        raise ConfigError(f"{path}: expected {(n - 1) * (M + 1)} values, found {body.size}")
    levels = body.reshape(n - 1, M + 1).astype(float)
    return CoeffTable(n, M, levels, level_log_scale(n), _reach(levels[-1], tol))


def default_cache_dir():
    return os.environ.get("UMVUE_CACHE_DIR") or os.path.join(
        os.path.expanduser("~"), ".cache", "umvue"
    )


_MEMO = {}


def coeff_table(n, *, y_min=Y_MIN, tol=DEFAULT_TOL, cache_dir=None, n_max=N_MAX, M_max=M_MAX):
    """Memoized :func:`build_coeffs` with an optional on-disk cache.

    ``cache_dir=False`` disables the disk cache; ``None`` uses
    :func:`default_cache_dir`. Cached files are reused when they already
    reach ``y_min``.
    """
    key = (n, y_min, tol.rel)
    if key in _MEMO:
        return _MEMO[key]
    n = _check_n(n, n_max)
    tbl = None
    directory = default_cache_dir() if cache_dir is None else cache_dir
    if directory:
        found = sorted(
            glob.glob(os.path.join(directory, f"gct1_n{n}_M*.bin")),
            key=lambda p: int(p.rsplit("_M", 1)[1][:-4]),
        )
        for path in reversed(found):
            try:
                cand = load_table(path, tol)
            except (ConfigError, OSError):
                continue
            if cand.y_min <= y_min:
                tbl = cand
                break
    if tbl is None:
        tbl = build_coeffs(n, y_min=y_min, tol=tol, n_max=n_max, M_max=M_max)
        if directory:
            try:
                os.makedirs(directory, exist_ok=True)
                save_table(tbl, os.path.join(directory, f"gct1_n{n}_M{tbl.M}.bin"))
            except OSError:
                pass
    _MEMO[key] = tbl
    return tbl


# ---------------------------------------------------------------------------
# Plain series evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GEval:
    value: float
    derivative: float
    terms_used: int
    converged: bool


def g_eval(tbl, y, tol=DEFAULT_TOL):
    """Sum ``G(y)`` and ``G'(y)`` term by term from the table.

    Raises
    ------
    NonConvergence
        When the stored coefficients run out before the stopping rule of
        :func:`~umvue.numkit.sum_series` is met, which happens for ``y``
        near 0. ``partial`` holds ``(G, G')`` so far.
    """
    y = float(y)
    if not 0 < y < 1:
        raise DomainError("g_eval needs 0 < y < 1")
    d = tbl.d
    w = 1.0 - y
    if not np.any(d[1:]):
        return GEval(float(d[0]), 0.0, 1, True)
    m = np.arange(tbl.M + 1)
    try:
        value, used = _sum_table(d, w, tol)
        deriv, _ = _sum_table(-m[1:] * d[1:], w, tol)
    except NonConvergence as exc:
        raise NonConvergence(
            f"G series not converged at y={y} with M={tbl.M}",
            partial=(float(np.sum(d * w**m)), float(-np.sum(m[1:] * d[1:] * w ** m[:-1]))),
            y=y,
        ) from exc
    return GEval(value, deriv, used, True)


def _sum_table(coef, w, tol):
    """Guarded sum of ``coef[m] * w**m`` over the stored coefficients."""
    count = {"k": 0}

    def term(m):
        count["k"] = m + 1
        return coef[m] * w**m

    total = sum_series(term, Tolerance(tol.rel, tol.abs, coef.size))
    return total, count["k"]


# ---------------------------------------------------------------------------
# Normalizers and densities
# ---------------------------------------------------------------------------

def _check_alpha(alpha):
    a = np.asarray(alpha, dtype=float)
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise DomainError("alpha must be finite and > 0")
    return a


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def log_K(n, alpha):
    """``log K(alpha)`` for the scaled coefficients (``d_0 = 1``).

    ``K(alpha) = Gamma(alpha)**-(n-1) * prod_{i=1}^{n-1} Gamma(alpha + i/n)
    / Gamma((n-1)/2)``.
    """
    n = _check_n(n, n_max=math.inf)
    a = _check_alpha(alpha)
    i = np.arange(1, n) / n
    val = (
        -(n - 1) * gammaln(a)
        + np.sum(gammaln(a[..., None] + i), axis=-1)
        - gammaln((n - 1) / 2)
    )
    return _scalar(val)


def log_K1(n, alpha):
    """``log K_1(alpha)``, normalizer of the auxiliary product of ``n - 2`` Betas.

    ``K_1(alpha) = Gamma(alpha)**-(n-2) * prod_{i=1}^{n-2} Gamma(alpha + i/n)
    / Gamma((n-1)(n-2)/(2n))``, paired with level ``n - 2`` of the table.
    """
    n = _check_n(n, n_max=math.inf)
    if n < 3:
        raise ConfigError("K_1 needs n >= 3")
    a = _check_alpha(alpha)
    i = np.arange(1, n - 1) / n
    val = (
        -(n - 2) * gammaln(a)
        + np.sum(gammaln(a[..., None] + i), axis=-1)
        - gammaln((n - 1) * (n - 2) / (2 * n))
    )
    return _scalar(val)


def log_K1_over_K_constant(n):
    """``log[K_1 / (K Gamma(alpha) Gamma((n-1)/n) / Gamma(alpha + (n-1)/n))]``.

    Alpha-free; equal to ``-log B((n-1)(n-2)/(2n), (n-1)/n)``. It is zero
    for unscaled coefficients and appears because both levels are scaled.
    """
    a = (n - 1) * (n - 2) / (2 * n)
    s = (n - 1) / n
    return float(gammaln(a + s) - gammaln(a) - gammaln(s))


def density_Y(n, alpha, y, tbl=None, gfun=None):
    """Density of ``Y`` at ``y``, evaluated in log space.

    Uses the hybrid evaluator :class:`GFunction`, so ``y`` may be arbitrarily
    close to 0.
    """
    gfun = gfun or GFunction.for_n(n, tbl)
    a = float(_check_alpha(alpha))
    y = np.asarray(y, dtype=float)
    if np.any((y <= 0) | (y >= 1)):
        raise DomainError("density_Y needs 0 < y < 1")
    logy = np.log(y)
    val = np.exp(log_K(n, a) + (a - 1) * logy + gfun.log_core(logy=logy))
    return _scalar(val)


def density_Y1(n, alpha, y, tbl):
    """Density of the auxiliary product ``prod_{i=1}^{n-2} Beta(alpha, i/n)``.

    Series only; ``y`` must lie where level ``n - 2`` converges.
    """
    if n < 3:
        raise ConfigError("Y_1 needs n >= 3")
    a = float(_check_alpha(alpha))
    y = float(y)
    if not 0 < y < 1:
        raise DomainError("density_Y1 needs 0 < y < 1")
    g1 = tbl.level(n - 2)
    w = 1.0 - y
    val = float(g1[0]) if not np.any(g1[1:]) else _sum_table(g1, w, DEFAULT_TOL)[0]
    expo = (n - 1) * (n - 2) / (2 * n) - 1
    return math.exp(log_K1(n, a) + (a - 1) * math.log(y) + expo * math.log(w)) * val


# ---------------------------------------------------------------------------
# Hybrid evaluator: power series near y = 1, Mellin inversion near y = 0
# ---------------------------------------------------------------------------

Y_SWITCH = 0.3
_STEP = 0.05
_CHUNK = 4096


class GFunction:
    """Vectorized evaluation of ``G`` and the quantities the estimators need.

    For ``y >= y_switch`` the power series is summed by Horner's rule. Below
    it, ``core(y)``, ``y core'(y)`` and ``int_y^1 core(x) dx / x`` are the
    inverse Mellin transforms of ``Gamma((n-1)/2) M(z)`` times ``1``, ``-z``
    and ``1/z``. They are computed by the trapezoidal rule along the
    hyperbola ``z(v) = z0 (1 + 1 - cosh v) + i z0 sinh v``, where ``z0`` is
    the real saddle point of ``M(z) y**-z``. The step is halved once and the
    two results compared; a discrepancy above ``tol.rel`` raises
    :class:`NonConvergence`.

    All methods take ``y`` (array-like) or ``logy`` (more accurate when
    ``y`` underflows). ``w = 1 - y`` may also be given directly, which keeps
    full relative precision for ``y`` close to 1.
    """

    def __init__(self, n, table=None, *, y_switch=Y_SWITCH, tol=DEFAULT_TOL):
        self.n = _check_n(n)
        self.c0 = (self.n - 3) / 2
        self.nu = (self.n - 1) / 2
        self.tol = tol
        self.y_switch = y_switch
        if table is None:
            table = coeff_table(self.n, y_min=0.5 * y_switch, tol=tol, cache_dir=False)
        if table.n != self.n:
            raise ConfigError("table was built for a different n")
        self.table = table
        self._prepare_series()
        self._log_gnu = math.lgamma(self.nu)
        self._log_const = -0.5 * (self.n - 1) * math.log(2 * math.pi) - 0.5 * math.log(self.n)

    _CACHE = {}

    @classmethod
    def for_n(cls, n, table=None):
        """Shared instance per ``(n, M)``; tables are immutable."""
        key = (n, None if table is None else table.M)
        inst = cls._CACHE.get(key)
        if inst is None:
            inst = cls._CACHE[key] = cls(n, table)
        return inst

    def _prepare_series(self):
        d = np.asarray(self.table.d, dtype=float)
        if self.n == 2:
            self._d = d[:1].copy()
            self._dd = np.zeros(1)
            self._tail = None
            return
        w_max = 1.0 - self.y_switch
        m = np.arange(d.size)
        D = np.cumsum(d)
        size = (m + 1) * D * w_max**m
        big = np.nonzero(size > 1e-17 * size.max())[0]
        cut = min(int(big[-1]) + 2, d.size)
        if size[cut - 1] > 1e-15 * size.max():
            raise ConfigError(
                f"table with M={self.table.M} does not reach y={self.y_switch}"
            )
        self._d = d[:cut]
        self._dd = (m[1:cut] * d[1:cut]) if cut > 1 else np.zeros(1)
        self._tail = D[:cut] / (m[:cut] + self.c0 + 1.0)

    # ----- input handling -----

    @staticmethod
    def _inputs(y, logy, w):
        if logy is None:
            y = np.asarray(y, dtype=float)
            if np.any((y <= 0) | (y >= 1)) or np.any(~np.isfinite(y)):
                raise DomainError("need 0 < y < 1")
            logy = np.log(y)
            w_ = 1.0 - y if w is None else np.asarray(w, dtype=float)
        else:
            logy = np.asarray(logy, dtype=float)
            if np.any(logy >= 0) or np.any(np.isnan(logy)):
                raise DomainError("need log y < 0")
            w_ = -np.expm1(logy) if w is None else np.asarray(w, dtype=float)
        return logy, np.broadcast_to(w_, logy.shape)

    # ----- series branch -----

    def _series(self, w, need):
        P = np.polynomial.polynomial.polyval
        out = {}
        if self.n == 2:
            out["log_core"] = -0.5 * np.log(w)
            out["score"] = -0.5 * (1.0 - w) / w
            if "tail" in need:
                s = np.sqrt(w)
                # int_y^1 x^-1 (1-x)^-1/2 dx = 2 atanh(sqrt(1-y)), divided by core
                out["tail"] = s * 2.0 * np.arctanh(s)
            return out
        G = P(w, self._d)
        dG = -P(w, self._dd)
        y = 1.0 - w
        out["log_core"] = self.c0 * np.log(w) + np.log(G)
        # -y core'/core = c0 y/(1-y) - y G'/G
        out["score"] = self.c0 * y / w - y * dG / G
        out["G"] = G
        out["dG"] = dG
        if "tail" in need:
            out["tail"] = w * P(w, self._tail) / G
        return out

    # ----- contour branch -----

    def _log_M(self, z):
        n = self.n
        return n * loggamma(z) - loggamma(n * z) + self._log_const + n * math.log(n) * z

    def _saddle(self, T):
        # d/dz log M = n (psi(z) - psi(n z) + log n), increasing from -inf to 0
        n = self.n
        lo = np.full(T.shape, math.log(1e-10))
        hi = np.full(T.shape, math.log(1e8))
        target = -T / n - math.log(n)
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            z = np.exp(mid)
            up = psi(z) - psi(n * z) > target
            hi = np.where(up, mid, hi)
            lo = np.where(up, lo, mid)
        return np.exp(0.5 * (lo + hi))

    def _contour(self, T, need):
        z0 = self._saddle(T)
        zT = z0 * T
        vmax = float(np.max(np.arccosh(1.0 + 50.0 / np.minimum(zT, 50.0)))) + 0.5
        v = np.arange(0.0, vmax + _STEP, _STEP)
        z = z0[:, None] * (2.0 - np.cosh(v) + 1j * np.sinh(v))
        dz = z0[:, None] * (-np.sinh(v) + 1j * np.cosh(v))
        E0 = self._log_M(z0.astype(complex)).real + zT
        with np.errstate(under="ignore", over="ignore"):
            base = np.exp(self._log_M(z) + z * T[:, None] - E0[:, None]) * dz
        wts = np.full(v.size, _STEP)
        wts[0] *= 0.5
        coarse = np.zeros(v.size)
        coarse[::2] = 2 * _STEP
        coarse[0] = _STEP

        def integrate(f):
            vals = np.imag(f)
            fine = vals @ wts
            rough = vals @ coarse
            return fine / math.pi, np.abs(fine - rough) / math.pi

        I0, e0 = integrate(base)
        err = e0 / np.abs(I0)
        out = {"log_core": self._log_gnu + E0 + np.log(I0)}
        if "score" in need:
            I1, e1 = integrate(base * z)
            out["score"] = I1 / I0
            err = np.maximum(err, e1 / np.maximum(np.abs(I1), 1e-300))
        if "tail" in need:
            I2, e2 = integrate(base / z)
            out["tail"] = I2 / I0
            err = np.maximum(err, e2 / np.abs(I2))
        bad = ~(err <= self.tol.rel) | ~np.isfinite(out["log_core"])
        if np.any(bad):
            raise NonConvergence(
                "contour quadrature for G did not reach tolerance",
                partial=float(np.max(err)),
                y=float(np.exp(-T[bad][0])),
                n=self.n,
            )
        return out

    # ----- dispatch -----

    def _evaluate(self, y=None, logy=None, w=None, need=("log_core",)):
        logy, w = self._inputs(y, logy, w)
        shape = logy.shape
        logy = logy.ravel()
        w = np.ascontiguousarray(w).ravel()
        out = {k: np.empty(logy.size) for k in need}
        near_one = w <= 1.0 - self.y_switch
        if self.n == 2:
            near_one[:] = True
        if np.any(near_one):
            res = self._series(w[near_one], need)
            for k in need:
                out[k][near_one] = res[k]
        idx = np.nonzero(~near_one)[0]
        for start in range(0, idx.size, _CHUNK):
            part = idx[start : start + _CHUNK]
            res = self._contour(-logy[part], need)
            for k in need:
                out[k][part] = res[k]
        return {k: _scalar(v.reshape(shape)) for k, v in out.items()}

    def log_core(self, y=None, *, logy=None, w=None):
        """``log[(1-y)**((n-3)/2) G(y)]``."""
        return self._evaluate(y, logy, w, ("log_core",))["log_core"]

    def score(self, y=None, *, logy=None, w=None):
        """``-y core'(y) / core(y)``, which is the shape estimator ``u_0``."""
        return self._evaluate(y, logy, w, ("score",))["score"]

    def tail_ratio(self, y=None, *, logy=None, w=None):
        """``int_y^1 core(x) dx/x / core(y)``, which is the estimator ``u_2``."""
        return self._evaluate(y, logy, w, ("tail",))["tail"]

    def evaluate(self, y=None, *, logy=None, w=None):
        """Dictionary with ``log_core``, ``score`` and ``tail`` at once."""
        return self._evaluate(y, logy, w, ("log_core", "score", "tail"))

    def value(self, y=None, *, logy=None, w=None):
        """``G(y)``."""
        logy_, w_ = self._inputs(y, logy, w)
        return _scalar(np.exp(self.log_core(logy=logy_, w=w_) - self.c0 * np.log(w_)))

    def derivative(self, y=None, *, logy=None, w=None):
        """``G'(y)``."""
        logy_, w_ = self._inputs(y, logy, w)
        res = self._evaluate(logy=logy_, w=w_, need=("log_core", "score"))
        G = np.exp(res["log_core"] - self.c0 * np.log(w_))
        y_ = np.exp(logy_)
        # y G'/G = c0 y/(1-y) - score
        return _scalar(G * (self.c0 * y_ / w_ - res["score"]) / y_)


# ---------------------------------------------------------------------------
# Moment identity behind the unbiasedness of the shape estimator
# ---------------------------------------------------------------------------

def identity_sum(n, alpha, tbl=None, *, y_split=Y_SWITCH, tol=DEFAULT_TOL):
    """``S = sum_m Gamma(m + (n-1)/2) / Gamma(alpha + m + (n-1)/2) * d_m``.

    The terms decay only like ``m**-(1+alpha)`` up to log factors, so each
    one is written as ``B(alpha, m + (n-1)/2) / Gamma(alpha)``, a Beta
    integral over ``(0, 1)``. The pieces over ``[y_split, 1)`` are summed
    with regularized incomplete Beta weights, which decay geometrically.
    Their sum over ``(0, y_split)`` equals ``int_0^y_split y**(alpha-1)
    core(y) dy / Gamma(alpha)``, and that integral is done by quadrature.

    The identity under test is ``S = 1 / (Gamma(alpha) K(alpha))``.
    """
    from scipy.special import betainc

    from .numkit import integrate

    n = _check_n(n)
    a = float(_check_alpha(alpha))
    gfun = GFunction.for_n(n, tbl)
    d = gfun.table.d if tbl is None else tbl.d
    nu = (n - 1) / 2
    m = np.arange(d.size)
    terms = d * np.exp(gammaln(m + nu) - gammaln(a + m + nu)) * betainc(m + nu, a, 1.0 - y_split)
    head = sum_series(lambda k: terms[k], Tolerance(tol.rel, tol.abs, d.size))
    lg_a = math.lgamma(a)

    def inner(y):
        return np.exp((a - 1) * np.log(y) + gfun.log_core(y) - lg_a)

    rest = integrate(inner, 0.0, y_split, Tolerance(tol.rel, tol.abs))
    return head + rest
