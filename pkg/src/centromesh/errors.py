"""Exception hierarchy shared by all centromesh modules."""


class CentromeshError(Exception):
    """Base class for every error raised by this package."""


class InputDomainError(CentromeshError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class ConfigurationError(CentromeshError, ValueError):
    """A grid, boundary or run configuration is inconsistent."""


class StructureError(CentromeshError, ValueError):
    """A matrix lacks the structure an operation relies on.

    The ``report`` attribute carries the :class:`~centromesh.assembly.CentroCheck`
    describing the first violation.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SingularityError(CentromeshError, ArithmeticError):
    """A factorization hit a (numerically) singular matrix.

    ``factor`` names the failing matrix, e.g. ``"B+C"`` or ``"A"``.
    """

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor
