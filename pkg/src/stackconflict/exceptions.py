"""Exception types raised across the package."""


class StackConflictError(Exception):
    """Base class for errors raised by this package."""


class NoFiniteCell(StackConflictError, ValueError):
    """Every leader action leads to a catastrophic (sentinel) outcome."""


class AssumptionViolated(StackConflictError, ValueError):
    """A 2x2 game does not have the anti-diagonal preference structure."""


class DegenerateCoefficients(StackConflictError, ValueError):
    """Augmented altruism is undefined when the coefficient product is 1."""


class LengthMismatch(StackConflictError, ValueError):
    pass


class InfeasibleStart(StackConflictError, ValueError):
    """Initial vehicle states already violate the separation ellipse."""


class NoConvergence(StackConflictError, RuntimeError):
    """The planner finished with constraint violation above tolerance.

    The best plans found are attached so callers can decide what to do.
    """

    def __init__(self, message, plans=None, violation=None):
        super().__init__(message)
        self.plans = plans
        self.violation = violation
