"""Unbiased and closed-form estimators for Gamma and Beta samples."""

from .beta_est import BetaFit, BetaParams, BetaSample, fit_beta
from .errors import (
    ConfigError,
    DegenerateSample,
    DomainError,
    NonConvergence,
    NumericalOverflow,
    PreconditionError,
    SingularityError,
    UmvueError,
)
from .gamma_est import GammaFit, GammaParams, GammaSample, fit_gamma, suff_stat
from .numkit import Tolerance

__all__ = [
    "BetaFit", "BetaParams", "BetaSample", "ConfigError", "DegenerateSample",
    "DomainError", "GammaFit", "GammaParams", "GammaSample", "NonConvergence",
    "NumericalOverflow", "PreconditionError", "SingularityError", "Tolerance",
    "UmvueError", "fit_beta", "fit_gamma", "suff_stat",
]
