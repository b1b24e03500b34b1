"""Exceptions raised by ptime.

Every error derives from :class:`PtimeError` so callers can catch the whole
family, and from the builtin it most resembles so generic handlers still work.
"""
import numpy as np


class PtimeError(Exception):
    """Base class for all ptime errors."""


class MappingWarning(UserWarning):
    """A mapping function is usable but outside the class the result assumes."""


# Mapping functions
class DomainError(PtimeError, ValueError):
    """Argument outside the domain of a mapping function."""


class NonFinite(PtimeError, ArithmeticError):
    """Evaluation overflowed the number format (too close to the horizon)."""


class ConvergenceError(PtimeError, RuntimeError):
    """Root finding did not converge within its iteration cap."""


# Dynamics and controllers
class SingularMass(PtimeError, np.linalg.LinAlgError):
    """The mass matrix is not positive definite at the evaluated configuration."""


class GainSignError(PtimeError, ValueError):
    """A gain matrix that must be negative definite is not."""


# Lyapunov machinery
class NotHurwitz(PtimeError, ValueError):
    """State matrix has an eigenvalue with nonnegative real part."""


class IllConditioned(PtimeError, np.linalg.LinAlgError):
    """The Lyapunov linear system is too ill-conditioned to trust."""


class BoundViolated(PtimeError, AssertionError):
    """The exponential decay envelope does not bound the matrix exponential.

    Attributes:
        t (float): first grid time at which the bound failed
    """

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


# Simulation and design
class SimulationDiverged(PtimeError, RuntimeError):
    """State norm left the admissible region.

    Attributes:
        trajectory (Trajectory): samples recorded up to the divergence
        t (float): time of the last admissible sample, also stamped on the 'Diverged' event
    """

    def __init__(self, message, trajectory=None, t=None):
        super().__init__(message)
        self.trajectory = trajectory
        self.t = t


class NotStabilizing(PtimeError, RuntimeError):
    """The infinite-time controller failed the empirical settling check."""


class NoCandidatePassed(PtimeError, RuntimeError):
    """No candidate mapping satisfied the convergence-rate assumption.

    Attributes:
        log (DesignLog): the reports of every rejected candidate
    """

    def __init__(self, message, log=None):
        super().__init__(message)
        self.log = log


class ScenarioError(PtimeError, ValueError):
    """Invalid scenario configuration.

    Attributes:
        path (str): dotted path of the offending key, e.g. ``controller.kappa.tau``
    """

    def __init__(self, path, message):
        super().__init__(f'{path}: {message}' if path else message)
        self.path = path
