"""Exception types shared across the package."""


class HodgeNtkError(Exception):
    """Base class for all errors raised by this package."""


class IndexOutOfRange(HodgeNtkError):
    """A vertex index is outside the declared vertex range."""


class ClosureViolation(HodgeNtkError):
    """A triangle references a face edge that is not present."""


class TooSmall(HodgeNtkError):
    """A generator was asked for an instance below its minimum size."""


class DegenerateRank(HodgeNtkError):
    """Singular-value thresholding is ambiguous; input is ill conditioned."""


class DimensionMismatch(HodgeNtkError):
    """An array argument has an incompatible shape."""


class NegativeVariance(HodgeNtkError):
    """A self-covariance diagonal is negative beyond numerical slack."""


class ZeroVarianceDerivative(HodgeNtkError):
    """A ReLU derivative map needs a variance bounded away from zero."""


class FeatureDimMismatch(HodgeNtkError):
    """Two feature matrices disagree on the feature dimension."""


class SolveFailure(HodgeNtkError):
    """A ridge solve did not reach the required residual tolerance."""


class FormatError(HodgeNtkError):
    """A text input file violates its format (message carries the line)."""


class InsufficientCandidates(HodgeNtkError):
    """Fewer candidates of a class are available than were requested."""


class DegenerateSubspace(HodgeNtkError):
    """A required Hodge subspace is empty."""
