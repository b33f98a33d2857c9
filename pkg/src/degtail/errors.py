"""Exception hierarchy shared by the numeric, series and verification layers."""


class SeriesError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SeriesError, ValueError):
    """Argument outside the real domain of a closed form (e.g. 1 + lambda*t <= 0)."""


class NonConvergenceError(SeriesError, ArithmeticError):
    """The requested infinite series does not converge for these parameters."""


class BudgetExceededError(SeriesError, ArithmeticError):
    """Summation hit ``max_terms`` before the remainder bound fell below ``tol``."""


class NonUnitError(SeriesError, ZeroDivisionError):
    """Division of a power series by one whose constant term is zero."""
