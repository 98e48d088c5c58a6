"""Exception hierarchy.

Every domain failure derives from :class:`QslLabError`; the CLI maps these to
exit status 1 and prints the class name.
"""


class QslLabError(ValueError):
    """Base class for domain errors raised by this package."""


class NotHermitian(QslLabError):
    pass


class InvalidState(QslLabError):
    """Matrix is not a density matrix (Hermitian, unit trace, positive)."""


class DegenerateNormalization(QslLabError):
    """Tr(U rho U^dag) vanished, usually from overflow at extreme gamma*t."""


class StepOverflow(QslLabError):
    pass


class NotPure(QslLabError):
    pass


class DegeneratePurity(QslLabError):
    pass


class BadGrid(QslLabError):
    """Quadrature grid has an even number of nodes or fewer than three."""


class QuadratureNonconvergent(QslLabError):
    pass


class NumericalDomain(QslLabError):
    """A value left its mathematical domain by more than rounding slack."""
