"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ConvergenceError(RuntimeError):
    """An iterative procedure stopped before reaching its tolerance.

    ``estimates`` holds the last two iterates so callers can judge how far
    off the result was.
    """

    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates


class BelowThresholdError(DomainError):
    """Potential strength rho0^2 <= 1/4: no bound states exist."""


class WallContaminationError(RuntimeError):
    """A matrix-route state is visibly affected by the embedding well wall."""


class TruncationWarning(UserWarning):
    """A requested ladder of states was cut short by double-precision underflow."""
