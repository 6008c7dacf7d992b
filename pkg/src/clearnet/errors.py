"""Exception hierarchy shared by all solvers and the CLI."""


class ClearnetError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ValidationError(ClearnetError, ValueError):
    """Input data violates a structural invariant of the network model."""

    exit_code = 2


class PreconditionError(ClearnetError):
    """A solver was called on a network outside its domain of validity."""

    exit_code = 3


class ConvergenceError(ClearnetError):
    """An iterative procedure did not settle within its cap."""

    exit_code = 4


class InternalError(ClearnetError, AssertionError):
    """A post-solve structural check failed. Points to a bug or a tolerance issue."""

    exit_code = 4
