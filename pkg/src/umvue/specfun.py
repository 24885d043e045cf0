"""Real log-Gamma, digamma, trigamma and log-Beta on the positive axis.

``digamma`` and ``trigamma`` shift the argument upward with the recurrences
``psi(x) = psi(x + 1) - 1/x`` and ``psi1(x) = psi1(x + 1) + 1/x**2`` until it
reaches ``SHIFT``, then apply the asymptotic (Bernoulli) series through the
``x**-14`` term. Every function accepts a float or an array; floats come back
as floats.
"""

import math

import numpy as np
from scipy.special import gammaln

SHIFT = 10.0

# B_2k for k = 1..7
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)
_DIGAMMA_C = tuple(b / (2 * k) for k, b in enumerate(_BERNOULLI, start=1))


def _check_positive(x, name="x"):
    from .errors import DomainError

    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} must be finite and > 0")
    return arr


def log_gamma(x):
    """Natural log of the Gamma function for ``x > 0``."""
    arr = _check_positive(x)
    if arr.ndim == 0:
        return math.lgamma(float(arr))
    return gammaln(arr)


def log_beta(a, b):
    """``log B(a, b) = log_gamma(a) + log_gamma(b) - log_gamma(a + b)``."""
    a_ = _check_positive(a, "a")
    b_ = _check_positive(b, "b")
    if a_.ndim == 0 and b_.ndim == 0:
        a_, b_ = float(a_), float(b_)
        return math.lgamma(a_) + math.lgamma(b_) - math.lgamma(a_ + b_)
    return gammaln(a_) + gammaln(b_) - gammaln(a_ + b_)


def _digamma_scalar(x):
    acc = 0.0
    while x < SHIFT:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    for c in reversed(_DIGAMMA_C):
        tail = (tail + c) * inv2
    return acc + math.log(x) - 0.5 / x - tail


def _trigamma_scalar(x):
    acc = 0.0
    while x < SHIFT:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    tail = 0.0
    for b in reversed(_BERNOULLI):
        tail = (tail + b) * inv2
    return acc + inv + 0.5 * inv2 + tail * inv


def digamma(x):
    """Digamma ``psi(x) = d/dx log Gamma(x)`` for ``x > 0``."""
    arr = _check_positive(x)
    if arr.ndim == 0:
        return _digamma_scalar(float(arr))
    x = arr.copy()
    acc = np.zeros_like(x)
    while True:
        low = x < SHIFT
        if not low.any():
            break
        acc[low] -= 1.0 / x[low]
        x[low] += 1.0
    inv2 = 1.0 / (x * x)
    tail = np.zeros_like(x)
    for c in reversed(_DIGAMMA_C):
        tail = (tail + c) * inv2
    return acc + np.log(x) - 0.5 / x - tail


def trigamma(x):
    """Trigamma ``psi_1(x) = d^2/dx^2 log Gamma(x)`` for ``x > 0``."""
    arr = _check_positive(x)
    if arr.ndim == 0:
        return _trigamma_scalar(float(arr))
    x = arr.copy()
    acc = np.zeros_like(x)
    while True:
        low = x < SHIFT
        if not low.any():
            break
        acc[low] += 1.0 / (x[low] * x[low])
        x[low] += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    tail = np.zeros_like(x)
    for b in reversed(_BERNOULLI):
        tail = (tail + b) * inv2
    return acc + inv + 0.5 * inv2 + tail * inv
