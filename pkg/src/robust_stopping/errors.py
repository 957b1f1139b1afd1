"""Exception hierarchy shared by all modules."""


class RobustStoppingError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgument(RobustStoppingError, ValueError):
    pass


class UnsupportedForDiscrete(RobustStoppingError):
    pass


class DivergentMean(RobustStoppingError):
    """The distribution has an infinite mean (or tail expectation)."""


class DegenerateCurvature(RobustStoppingError):
    """2F'(p*) + p*F''(p*) is not strictly positive."""


class PreconditionFailed(RobustStoppingError):
    pass


class ArityMismatch(RobustStoppingError, ValueError):
    pass


class SearchTooLarge(RobustStoppingError):
    pass


class NotProgressing(RobustStoppingError):
    pass


class Infeasible(RobustStoppingError):
    pass


class NoWorstCaseFamily(RobustStoppingError):
    pass


class BoundInconsistency(RobustStoppingError):
    """Computed bounds violate lower <= upper."""
