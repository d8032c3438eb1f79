"""
Exception hierarchy shared by the algebra, cohomology and CLI layers.
Mathematical check failures are never raised; they are returned as reports.
"""


class TransverseError(Exception):
    """Base class for every error raised by this package."""


class TagMismatchError(TransverseError):
    """Two combinations over different algebras were combined."""


class CapExceededError(TransverseError):
    """A computation left the finite truncation it was asked to stay in."""


class DimensionMismatchError(TransverseError):
    """A vector does not fit the matrix it is tested against."""


class UnknownNameError(TransverseError):
    """Unregistered algebra, cocycle, class or generator name."""


class NotACocycleError(TransverseError):
    """An operation requiring a cocycle received something else."""


class ConfigError(TransverseError):
    """Invalid configuration value or flag."""


class ParseError(TransverseError):
    """Syntax error in the surface expression language."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class WeightError(TransverseError):
    """Input is not weight-homogeneous, or has a weight the operation excludes."""
