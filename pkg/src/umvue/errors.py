"""Exception hierarchy shared by all modules."""


class UmvueError(Exception):
    """Base class for every error raised by this package."""


class DomainError(UmvueError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(UmvueError, ValueError):
    """An estimator was requested for a sample size where it does not exist."""


class DegenerateSample(UmvueError, ValueError):
    """All observations are equal, so the sufficient statistic is singular."""


class ConfigError(UmvueError, ValueError):
    """A size or tolerance setting is out of its supported range."""


class NonConvergence(UmvueError, ArithmeticError):
    """An iterative routine exhausted its budget before meeting tolerance.

    Attributes
    ----------
    partial : float or None
        Best value reached before giving up.
    where : dict
        Context such as the evaluation point or iteration count.
    """

    def __init__(self, message, partial=None, **where):
        super().__init__(message)
        self.partial = partial
        self.where = where


class SingularityError(UmvueError, ArithmeticError):
    """A closed-form expression hit a removable or true singularity."""


class NumericalOverflow(UmvueError, OverflowError):
    """An intermediate quantity left the range of double precision."""
