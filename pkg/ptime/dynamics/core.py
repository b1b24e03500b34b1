from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from ptime.errors import SingularMass


class EulerLagrangeModel():
    """
    Euler-Lagrange system M(q) qdd + C(qd, q) qd + g(q) = u + d

    Subclasses override mass, coriolis and gravity. The base class can also
    wrap three module-level callables, which keeps the model picklable for
    worker pools.

    Args:
        n (int): degrees of freedom
        mass (function, optional): q -> (n, n) inertia matrix
        coriolis (function, optional): (qd, q) -> (n, n) Coriolis matrix
        gravity (function, optional): q -> (n,) gravity vector
    """

    def __init__(self, n, mass=None, coriolis=None, gravity=None):
        if int(n) < 1:
            raise ValueError(f'n must be positive, got {n}')
        self.n = int(n)
        self._mass = mass
        self._coriolis = coriolis
        self._gravity = gravity

    def mass(self, q):
        return np.asarray(self._mass(q), dtype=float)

    def coriolis(self, qd, q):
        if self._coriolis is None:
            return np.zeros((self.n, self.n))
        return np.asarray(self._coriolis(qd, q), dtype=float)

    def gravity(self, q):
        if self._gravity is None:
            return np.zeros(self.n)
        return np.asarray(self._gravity(q), dtype=float)

    def toDict(self):
        raise NotImplementedError(f'{type(self).__name__} has no config form')


class ConstantInertiaModel(EulerLagrangeModel):
    """
    Model with constant inertia, no Coriolis terms and optional constant gravity

    Args:
        M (ndarray): (n, n) symmetric positive definite inertia
        g (ndarray, optional): constant gravity vector
    """

    def __init__(self, M, g=None):
        M = np.atleast_2d(np.asarray(M, dtype=float))
        super().__init__(M.shape[0])
        self.M = M
        self.g = np.zeros(self.n) if g is None else np.asarray(g, dtype=float)

    def mass(self, q):
        return self.M

    def gravity(self, q):
        return self.g


def forwardDynamics(model, q, qd, u, d=None):
    '''
    Solve M(q) qdd = u + d - C(qd, q) qd - g(q) for the accelerations

    Args:
        model (EulerLagrangeModel): the system
        q (ndarray): joint positions in rad
        qd (ndarray): joint velocities in rad/s
        u (ndarray): control torques
        d (ndarray, optional): disturbance torques

    Returns:
        qdd (ndarray): joint accelerations

    Raises:
        SingularMass: if M(q) is not positive definite

    Examples:
        >>> import numpy as np
        >>> from ptime.dynamics import twoLinkModel, forwardDynamics
        >>> model = twoLinkModel()
        >>> q = np.zeros(2)
        >>> forwardDynamics(model, q, q, model.gravity(q))
        array([0., 0.])
    '''
    M = model.mass(q)
    torque = np.asarray(u, dtype=float)
    if d is not None:
        torque = torque + d
    rhs = torque - model.coriolis(qd, q) @ qd - model.gravity(q)
    try:
        factor = cho_factor(M, check_finite=False)
    except LinAlgError as e:
        raise SingularMass(f'mass matrix not positive definite at q={q}') from e
    return cho_solve(factor, rhs, check_finite=False)


def kineticEnergy(model, q, qd):
    '''Kinetic energy 0.5 qd^T M(q) qd'''
    return 0.5 * qd @ model.mass(q) @ qd


def massDerivative(model, q, qd, step=1e-6):
    '''Time derivative of M(q(t)) along qd by central differences'''
    return (model.mass(q + step * qd) - model.mass(q - step * qd)) / (2 * step)


@dataclass
class PropertyReport:
    """
    Result of a randomized structural check

    Attributes:
        name (str): property checked
        passed (bool): True if the worst sample is within tolerance
        worst (float): largest violation over the samples
        tol (float): tolerance used
        samples (int): number of random samples
    """
    name: str
    passed: bool
    worst: float
    tol: float
    samples: int

    def __bool__(self):
        return self.passed


def _sampler(model, seed, qrange, qdrange):
    rng = np.random.Generator(np.random.Philox(seed))
    n = model.n
    while True:
        yield (rng.uniform(-qrange, qrange, n), rng.uniform(-qdrange, qdrange, n),
               rng.uniform(-1, 1, n), rng.uniform(0.1, 3.0))


def massCheck(model, samples=1000, seed=0, qrange=np.pi):
    '''
    Check that M(q) is symmetric positive definite on random configurations

    Returns:
        report (PropertyReport): worst is the largest of the asymmetry and
            the negated smallest eigenvalue
    '''
    worst = -np.inf
    draw = _sampler(model, seed, qrange, 1.0)
    for _ in range(samples):
        q, _qd, _x, _a = next(draw)
        M = model.mass(q)
        asym = np.max(np.abs(M - M.T))
        lmin = np.linalg.eigvalsh(0.5 * (M + M.T))[0]
        worst = max(worst, asym, -lmin)
    return PropertyReport('mass', bool(worst < 0), float(worst), 0.0, samples)


def coriolisLinearityCheck(model, samples=1000, seed=0, tol=1e-10, qrange=np.pi, qdrange=2.0):
    '''
    Check C(a qd, q) = a C(qd, q) for random a, qd, q

    Returns:
        report (PropertyReport): worst absolute entry mismatch
    '''
    worst = 0.0
    draw = _sampler(model, seed, qrange, qdrange)
    for _ in range(samples):
        q, qd, _x, a = next(draw)
        a = a * (1 if a > 1.5 else -1)
        diff = model.coriolis(a * qd, q) - a * model.coriolis(qd, q)
        worst = max(worst, float(np.max(np.abs(diff))))
    return PropertyReport('coriolisLinearity', worst <= tol, worst, tol, samples)


def skewSymmetryCheck(model, samples=1000, seed=0, tol=1e-6, step=1e-6, qrange=np.pi, qdrange=2.0):
    '''
    Check x^T (Mdot - 2C) x = 0 with Mdot from central differences along qd

    Args:
        model (EulerLagrangeModel): the system
        samples (int, optional): number of random (x, q, qd) draws
        seed (int, optional): random seed
        tol (float, optional): tolerance on |x^T (Mdot - 2C) x|
        step (float, optional): finite difference step

    Returns:
        report (PropertyReport): worst quadratic form magnitude
    '''
    worst = 0.0
    draw = _sampler(model, seed, qrange, qdrange)
    for _ in range(samples):
        q, qd, x, _a = next(draw)
        N = massDerivative(model, q, qd, step) - 2 * model.coriolis(qd, q)
        worst = max(worst, abs(float(x @ N @ x)))
    return PropertyReport('skewSymmetry', worst <= tol, worst, tol, samples)
