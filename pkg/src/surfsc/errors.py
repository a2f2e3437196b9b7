"""Exception hierarchy shared by all solvers.

Two families matter to callers: invalid parameters (bad inputs, caught
before any work starts) and non-convergence (a solver gave up).  The CLI
maps them to exit codes 2 and 1 respectively.
"""


class SurfscError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(SurfscError, ValueError):
    """Inputs violate a documented precondition."""


class TruncationError(InvalidParameterError):
    """Domain truncation too short: the solution has not decayed at the far end."""


class UnconvergedInputError(InvalidParameterError):
    """An operation received a solution object that is not converged."""


class GeometryError(InvalidParameterError):
    """Curve is not smooth/simple, or a segment lies outside the boundary."""


class NonConvergenceError(SurfscError, RuntimeError):
    """An iterative solver hit its damping floor or iteration cap."""


class BracketError(NonConvergenceError):
    """A scalar search bracket failed (not unimodal, or no sign change).

    Usually a signal that the discretization is too coarse, not that the
    underlying problem is ill-posed.
    """
