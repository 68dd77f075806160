"""Exception types shared across the package."""


class MotKitError(Exception):
    """Base class for all motkit errors."""


class InvalidInput(MotKitError):
    """A scalar argument violates its precondition (non-positive length, etc.)."""


class InvalidGeometry(MotKitError):
    """A geometry description cannot be realised (degenerate normal, bar collision)."""


class ClearanceError(MotKitError):
    """Conductors intrude into the laser beam volume."""


class SingularPoint(MotKitError):
    """Field requested too close to a filament for the analytic formula to be trusted."""

    def __init__(self, message, segment_index=None):
        super().__init__(message)
        self.segment_index = segment_index


class EmptySample(MotKitError):
    """Every requested sample point was singular."""


class ZeroNotBracketed(MotKitError):
    """The |B| minimum sits on the search-region boundary."""


class DegenerateFit(MotKitError):
    """Least-squares fit has no usable degrees of freedom."""


class ObjectiveEvaluationError(MotKitError):
    """Objective evaluation failed; the search treats this as +inf."""


class InfeasibleStart(MotKitError):
    """Optimization started from a point violating a hard constraint."""
