"""Seeded sampling and Monte Carlo checks of unbiasedness and asymptotics.

Replications are grouped into fixed-size blocks. Block ``k`` draws from its
own generator seeded by ``SeedSequence([seed, k])``, so a report depends
only on the experiment settings and never on the order in which blocks are
run.
"""

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import beta_est, gamma_est
from .beta_est import BetaParams, BetaSample
from .errors import ConfigError, NonConvergence, UmvueError
from .gamma_est import GammaParams, GammaSample

BLOCK = 1000
MAX_FAILURE_RATE = 1e-3


def substream(seed, block=0):
    """Independent generator for ``(seed, block)``."""
    if seed < 0 or block < 0:
        raise ConfigError("seed and block must be nonnegative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(block)])))


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else substream(seed)


def gamma_draws(p, shape, rng):
    return rng.standard_gamma(p.alpha, size=shape) / p.lam


def beta_draws(p, shape, rng):
    ga = rng.standard_gamma(p.alpha, size=shape)
    gb = rng.standard_gamma(p.beta, size=shape)
    x = ga / (ga + gb)
    # ratios can round onto the boundary for tiny shapes
    return np.clip(x, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))


def sample_gamma(p, n, seed):
    """``n`` i.i.d. Gamma(alpha, rate lam) draws."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    x = gamma_draws(p, n, _rng(seed))
    return GammaSample(x) if n >= 2 else x


def sample_beta(p, n, seed):
    """``n`` i.i.d. Beta(alpha, beta) draws as ``G_a / (G_a + G_b)``."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    x = beta_draws(p, n, _rng(seed))
    return BetaSample(x) if n >= 2 else x


# ---------------------------------------------------------------------------
# Estimator registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Estimator:
    dist: str
    min_n: int
    target: object
    batch: object


def _umvue(key):
    def run(x):
        X, logY = gamma_est.suff_stat_batch(x)
        return gamma_est.umvue_batch(x.shape[-1], X, logY)[key]
    return run


def _beta_column(k):
    return lambda x: beta_est.fit_beta_batch(x)[k]


ESTIMATORS = {
    "umvue_alpha": Estimator("gamma", 4, lambda p: p.alpha, _umvue("u0")),
    "umvue_lambda": Estimator("gamma", 4, lambda p: p.lam, _umvue("u1")),
    "umvue_inv_alpha": Estimator("gamma", 2, lambda p: 1.0 / p.alpha, _umvue("u2")),
    "umvue_inv_lambda": Estimator("gamma", 2, lambda p: 1.0 / p.lam, _umvue("u3")),
    "yechen_inv_lambda": Estimator("gamma", 2, lambda p: 1.0 / p.lam, gamma_est.yechen_inv_lambda),
    "yechen_inv_alpha": Estimator("gamma", 2, lambda p: 1.0 / p.alpha, gamma_est.yechen_inv_alpha),
    "beta_u_stat": Estimator("beta", 2, lambda p: 1.0 / (p.alpha + p.beta), _beta_column(2)),
    "beta_alpha_hat": Estimator("beta", 2, lambda p: p.alpha, _beta_column(0)),
    "beta_beta_hat": Estimator("beta", 2, lambda p: p.beta, _beta_column(1)),
}


@dataclass(frozen=True)
class ExperimentSpec:
    estimator: str
    alpha: float
    n: int
    reps: int
    seed: int = 0
    lam: float | None = None
    beta: float | None = None
    threshold: float = 3.0

    def __post_init__(self):
        est = ESTIMATORS.get(self.estimator)
        if est is None:
            raise ConfigError(f"unknown estimator {self.estimator!r}; known: {sorted(ESTIMATORS)}")
        if self.reps < 2:
            raise ConfigError("reps must be >= 2")
        if self.n < est.min_n:
            raise ConfigError(f"{self.estimator} requires n >= {est.min_n}")
        if est.dist == "gamma" and self.lam is None:
            raise ConfigError(f"{self.estimator} needs lambda")
        if est.dist == "beta" and self.beta is None:
            raise ConfigError(f"{self.estimator} needs beta")

    @property
    def params(self):
        if ESTIMATORS[self.estimator].dist == "gamma":
            return GammaParams(self.alpha, self.lam)
        return BetaParams(self.alpha, self.beta)


_CONFIG_KEYS = {
    "estimator": str, "alpha": float, "beta": float, "lambda": float, "lam": float,
    "n": int, "reps": int, "seed": int, "threshold": float,
}


def parse_config(text):
    """Build an :class:`ExperimentSpec` from ``key=value`` lines.

    Blank lines and ``#`` comments are skipped. ``lambda`` and ``lam`` are
    synonyms.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: expected key=value with key in {sorted(_CONFIG_KEYS)}")
        try:
            values["lam" if key == "lambda" else key] = _CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    try:
        return ExperimentSpec(**values)
    except TypeError as exc:
        raise ConfigError(f"incomplete experiment config: {exc}") from exc


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

@dataclass
class McReport:
    estimator: str
    replications: int
    failures: int
    estimate_mean: float
    estimate_se: float
    target: float
    z_score: float
    threshold: float
    passed: bool
    wall_time: float
    empirical_cov: list | None = None
    notes: list = field(default_factory=list)

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def _draws(spec, shape, rng):
    p = spec.params
    if isinstance(p, GammaParams):
        return gamma_draws(p, shape, rng)
    return beta_draws(p, shape, rng)


def _block_values(est, x):
    try:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.asarray(est.batch(x), dtype=float)
    except (NonConvergence, UmvueError):
        pass
    # fall back to one row at a time so a single bad sample only costs itself
    out = np.empty(x.shape[0])
    for i, row in enumerate(x):
        try:
            out[i] = float(np.asarray(est.batch(row[None, :]), dtype=float)[0])
        except (NonConvergence, UmvueError):
            out[i] = np.nan
    return out


def simulate(spec):
    """Estimator values for every replication, ``nan`` where it failed."""
    est = ESTIMATORS[spec.estimator]
    parts = []
    for k, start in enumerate(range(0, spec.reps, BLOCK)):
        size = min(BLOCK, spec.reps - start)
        x = _draws(spec, (size, spec.n), substream(spec.seed, k))
        parts.append(_block_values(est, x))
    return np.concatenate(parts)


def run_experiment(spec):
    """Replicate an estimator and test its mean against the true target.

    The report passes when ``|mean - target| <= threshold * SE`` and no
    more than 0.1% of replications failed.
    """
    t0 = time.perf_counter()
    est = ESTIMATORS[spec.estimator]
    values = simulate(spec)
    ok = np.isfinite(values)
    good = values[ok]
    failures = int(values.size - good.size)
    target = float(est.target(spec.params))
    mean = math.fsum(good) / good.size if good.size else math.nan
    var = math.fsum((good - mean) ** 2) / (good.size - 1) if good.size > 1 else math.nan
    se = math.sqrt(var / good.size)
    z = (mean - target) / se if se > 0 else math.inf
    notes = []
    fail_ok = failures <= MAX_FAILURE_RATE * spec.reps
    if not fail_ok:
        notes.append(f"{failures} of {spec.reps} replications failed")
    return McReport(
        estimator=spec.estimator,
        replications=spec.reps,
        failures=failures,
        estimate_mean=mean,
        estimate_se=se,
        target=target,
        z_score=z,
        threshold=spec.threshold,
        passed=bool(abs(z) <= spec.threshold and fail_ok),
        wall_time=time.perf_counter() - t0,
        notes=notes,
    )


def run_beta_clt(p, n, reps, seed, rel_tol=0.10):
    """Compare the covariance of ``sqrt(n) (alpha_hat - alpha, beta_hat - beta)`` with ``Delta``.

    Passes when every entry is within ``rel_tol`` relative error.
    """
    t0 = time.perf_counter()
    dev = []
    for k, start in enumerate(range(0, reps, BLOCK)):
        size = min(BLOCK, reps - start)
        x = beta_draws(p, (size, n), substream(seed, k))
        a, b, _, _ = beta_est.fit_beta_batch(x)
        dev.append(np.sqrt(n) * np.column_stack([a - p.alpha, b - p.beta]))
    dev = np.concatenate(dev)
    good = np.all(np.isfinite(dev), axis=1)
    cov = np.cov(dev[good], rowvar=False)
    delta = beta_est.delta_matrix(p)
    rel = np.abs(cov - delta) / np.abs(delta)
    failures = int((~good).sum())
    worst = float(rel.max())
    return McReport(
        estimator="beta_clt",
        replications=reps,
        failures=failures,
        estimate_mean=worst,
        estimate_se=math.nan,
        target=0.0,
        z_score=math.nan,
        threshold=rel_tol,
        passed=bool(worst <= rel_tol and failures <= MAX_FAILURE_RATE * reps),
        wall_time=time.perf_counter() - t0,
        empirical_cov=cov.tolist(),
        notes=[f"largest relative deviation from Delta: {worst:.4f}"],
    )


def block_variances(spec, blocks=(10**3, 10**4, 10**5)):
    """Sample variance of the estimator over growing prefixes of the replications.

    Useful for seeing whether the variance settles (finite) or keeps
    jumping (heavy tails). ``spec.reps`` must be at least ``max(blocks)``.
    """
    values = simulate(spec)
    out = {}
    for m in blocks:
        v = values[:m]
        v = v[np.isfinite(v)]
        out[m] = float(np.var(v, ddof=1))
    return out
