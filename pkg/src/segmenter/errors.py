"""Exception hierarchy shared by the solvers and the CLI."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class CatalogError(DomainError):
    """A catalog file or catalog specification could not be accepted."""


class RefusalError(DomainError):
    """The request is valid in principle but exceeds a configured size cap."""


class ConvergenceError(RuntimeError):
    """An iterative solve did not reach its tolerance.

    ``report`` carries whatever diagnostic object the failing solver had
    (a :class:`~segmenter.special.ScalarSolveReport` or a dynamics trace).
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InternalConsistencyError(RuntimeError):
    """A computed equilibrium failed its own first-order verification."""
