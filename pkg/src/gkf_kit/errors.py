"""Exception hierarchy shared by every module."""


class GkfError(Exception):
    """Base class for all library errors."""


class InvalidArgument(GkfError, ValueError):
    pass


class DomainError(GkfError, ValueError):
    """Argument lies outside the domain where a function is defined."""


class SeriesError(GkfError, ArithmeticError):
    """An infinite series failed to converge within its term cap."""


class OrderOutOfRange(GkfError, ValueError):
    pass


class DegenerateCone(GkfError, ValueError):
    pass


class InvalidModel(GkfError, ValueError):
    pass


class InsufficientOrder(GkfError, ValueError):
    pass


class IncompleteBoundaryData(GkfError, ValueError):
    pass


class FitUnstable(GkfError, ArithmeticError):
    pass


class WindowTooNarrow(GkfError, ArithmeticError):
    """No Monte Carlo sample landed in the coarea window."""


class ProjectionFailure(GkfError, ArithmeticError):
    pass


class UnderResolved(GkfError, ValueError):
    """Covariance scale too small for the grid spacing."""
