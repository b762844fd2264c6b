class MultatlasError(Exception):
    """Base class for errors raised by multatlas."""


class ParabolicError(MultatlasError, ArithmeticError):
    """The cyclic derivative system is singular (multiplier too close to 1)."""


class EscapedError(MultatlasError, OverflowError):
    """An orbit left the representable range."""


class CriticallyPeriodicError(MultatlasError, ArithmeticError):
    """F_k(c) vanishes: the critical point is periodic at this parameter."""


class IncompleteOrbitsError(MultatlasError):
    """Orbit data needed by a computation is missing or flagged incomplete."""

    def __init__(self, message, periods=()):
        super().__init__(message)
        self.periods = tuple(periods)


class PoleError(MultatlasError, ZeroDivisionError):
    """A closed-form expression was evaluated at one of its poles."""
