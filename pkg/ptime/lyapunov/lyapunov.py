from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_continuous_lyapunov, expm, eigvals, eigh

from ptime.errors import NotHurwitz, IllConditioned, BoundViolated, DomainError
from ptime.timewarp import KappaMap, Family


@dataclass
class LyapunovSolution:
    """
    Solution of X Q + Q^T X = -I with the decay envelope it implies

    Attributes:
        Q (ndarray): closed-loop state matrix
        X (ndarray): symmetric positive definite solution
        xNorm (float): spectral norm of X
        xInvNorm (float): spectral norm of X^-1
        envelopeCoeff (float): sqrt(2 ||X^-1|| ||X||)
        envelopeRate (float): 1/(2 ||X||)
    """
    Q: np.ndarray
    X: np.ndarray
    xNorm: float
    xInvNorm: float
    envelopeCoeff: float
    envelopeRate: float

    @property
    def residual(self):
        '''Spectral norm of X Q + Q^T X + I'''
        R = self.X @ self.Q + self.Q.T @ self.X + np.eye(self.Q.shape[0])
        return float(np.linalg.norm(R, 2))

    def envelope(self, t):
        '''Bound sqrt(2 ||X^-1|| ||X||) exp(-t/(2||X||)) on ||exp(Qt)||'''
        return self.envelopeCoeff * np.exp(-self.envelopeRate * np.asarray(t))


def closedLoopMatrix(P, D):
    '''
    State matrix [[0, I], [P, D]] of the linear closed loop qdd = P q_e + D qd

    Examples:
        >>> import numpy as np
        >>> from ptime.lyapunov import closedLoopMatrix
        >>> closedLoopMatrix(-0.1*np.eye(1), -np.eye(1))
        array([[ 0. ,  1. ],
               [-0.1, -1. ]])
    '''
    P = np.atleast_2d(np.asarray(P, dtype=float))
    D = np.atleast_2d(np.asarray(D, dtype=float))
    n = P.shape[0]
    return np.block([[np.zeros((n, n)), np.eye(n)], [P, D]])


def lyapunovOperator(Q):
    '''Matrix of X -> X Q + Q^T X acting on column-stacked X'''
    N = Q.shape[0]
    I = np.eye(N)
    return np.kron(Q.T, I) + np.kron(I, Q.T)


def solveLyapunov(Q, hurwitz_tol=1e-12, cond_max=1e12):
    '''
    Solve the Lyapunov equation X Q + Q^T X = -I

    Args:
        Q (ndarray): (N, N) Hurwitz matrix
        hurwitz_tol (float, optional): eigenvalue real parts must be below -hurwitz_tol
        cond_max (float, optional): largest accepted condition number of the linear operator

    Returns:
        solution (LyapunovSolution): X with its norms and decay envelope

    Raises:
        NotHurwitz: if an eigenvalue of Q has real part >= -hurwitz_tol
        IllConditioned: if the operator condition number exceeds cond_max

    Examples:
        >>> import numpy as np
        >>> from ptime.lyapunov import solveLyapunov
        >>> sol = solveLyapunov(np.array([[0, 1], [-0.1, -1]]))
        >>> sol.X
        array([[5.55, 5.  ],
               [5.  , 5.5 ]])
    '''
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    top = np.max(eigvals(Q).real)
    if top >= -hurwitz_tol:
        raise NotHurwitz(f'largest eigenvalue real part {top:g} is not negative')
    cond = np.linalg.cond(lyapunovOperator(Q))
    if cond > cond_max:
        raise IllConditioned(f'Lyapunov operator condition number {cond:.3g} exceeds {cond_max:g}')
    X = solve_continuous_lyapunov(Q.T, -np.eye(Q.shape[0]))
    X = 0.5 * (X + X.T)
    lam = eigh(X, eigvals_only=True)
    if lam[0] <= 0:
        raise IllConditioned(f'solution is not positive definite, smallest eigenvalue {lam[0]:g}')
    xNorm = float(lam[-1])
    xInvNorm = float(1 / lam[0])
    return LyapunovSolution(Q, X, xNorm, xInvNorm, float(np.sqrt(2 * xInvNorm * xNorm)), 1 / (2 * xNorm))


def exponentialMu(tau, x_norm, alpha=0.45):
    '''
    Mapping whose inverse is mu(s) = tau (1 - exp(-alpha s/||X||))

    The mapping is kappa(t) = -(||X||/alpha) ln(1 - t/tau). Its inverse has
    mu'(0) = alpha tau/||X||, so the map is class K1 only when ||X|| = alpha tau.

    Args:
        tau (float): horizon in s
        x_norm (float): spectral norm of the Lyapunov solution
        alpha (float, optional): rate factor in (0, 0.5)

    Returns:
        kmap (KappaMap): ExpInverse mapping

    Raises:
        DomainError: if a parameter is out of range
    '''
    if not 0 < alpha < 0.5:
        raise DomainError(f'alpha must lie in (0, 0.5), got {alpha}')
    if not x_norm > 0:
        raise DomainError(f'x_norm must be positive, got {x_norm}')
    return KappaMap(Family.EXP_INVERSE, ((alpha, x_norm),), tau)


@dataclass
class EnvelopeReport:
    """
    Pointwise comparison of ||exp(Qt)|| with the Lyapunov envelope

    Attributes:
        times (ndarray): grid times
        ratios (ndarray): ||exp(Qt)|| divided by the envelope
        maxRatio (float): largest ratio
        tMax (float): time of the largest ratio
    """
    times: np.ndarray
    ratios: np.ndarray
    maxRatio: float
    tMax: float


def envelopeCheck(Q, solution=None, horizon=100.0, grid=1001, tol=1e-8):
    '''
    Check ||exp(Qt)|| <= sqrt(2 ||X^-1|| ||X||) exp(-t/(2||X||)) on a grid

    exp(Q dt) is computed once by scaling and squaring and the grid values are
    its powers.

    Args:
        Q (ndarray): Hurwitz state matrix
        solution (LyapunovSolution, optional): output of solveLyapunov(Q)
        horizon (float, optional): end of the grid in s
        grid (int, optional): number of grid points
        tol (float, optional): accepted excess of the ratio over 1

    Returns:
        report (EnvelopeReport): ratios along the grid

    Raises:
        BoundViolated: at the first grid time where the ratio exceeds 1 + tol
    '''
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if solution is None:
        solution = solveLyapunov(Q)
    times = np.linspace(0, horizon, grid)
    E = expm(Q * (times[1] - times[0])) if grid > 1 else np.eye(Q.shape[0])
    Phi = np.eye(Q.shape[0])
    ratios = np.empty(grid)
    for k, t in enumerate(times):
        ratios[k] = np.linalg.norm(Phi, 2) / solution.envelope(t)
        if ratios[k] > 1 + tol:
            raise BoundViolated(f'envelope exceeded at t={t:g}: ratio {ratios[k]:.12g}', t=float(t))
        Phi = Phi @ E
    k = int(np.argmax(ratios))
    return EnvelopeReport(times, ratios, float(ratios[k]), float(times[k]))
