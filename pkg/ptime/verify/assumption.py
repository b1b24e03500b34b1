import logging
from dataclasses import dataclass, field

import numpy as np
import cvxpy as cvx

from ptime.dynamics import forwardDynamics
from ptime.controllers import FeedbackLinearizationITC
from ptime.sim import integrate
from ptime.timewarp import MuMap, KappaMap, evalMu
from ptime.lyapunov import closedLoopMatrix

log = logging.getLogger(__name__)


def fitEnvelope(times, values, floor=1e-14):
    '''
    Tightest exponential envelope rho exp(-rate t) above a sampled signal

    Solved as a linear program in log space: minimize the summed log envelope
    subject to lying above every sample larger than floor, with rate >= 0.

    Args:
        times (ndarray): sample times
        values (ndarray): nonnegative samples
        floor (float, optional): samples at or below floor are ignored

    Returns:
        rho, rate (float): envelope coefficient and decay rate, (0, 0) if no sample exceeds floor

    Examples:
        >>> import numpy as np
        >>> from ptime.verify import fitEnvelope
        >>> t = np.linspace(0, 10, 101)
        >>> rho, rate = fitEnvelope(t, 2*np.exp(-0.5*t))
        >>> np.round([rho, rate], 6)
        array([2. , 0.5])
    '''
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = values > floor
    if not np.any(keep):
        return 0.0, 0.0
    t = times[keep]
    logv = np.log(values[keep])
    c = cvx.Variable()
    rate = cvx.Variable(nonneg=True)
    problem = cvx.Problem(cvx.Minimize(cvx.sum(c - rate * t)), [c - rate * t >= logv])
    problem.solve()
    if rate.value is None:
        return float(np.exp(np.max(logv))), 0.0
    return float(np.exp(c.value)), float(rate.value)


def linearizedClosedLoop(model, itc):
    '''
    State matrix of the closed loop linearized at the target, or None for laws without P and D

    Uses M(q_d) qdd = P q_e + D qd for PD-type laws and qdd = P q_e + D qd for
    feedback linearization.
    '''
    if itc.P is None or itc.D is None:
        return None
    if isinstance(itc, FeedbackLinearizationITC):
        return closedLoopMatrix(itc.P, itc.D)
    Minv = np.linalg.inv(model.mass(itc.target))
    return closedLoopMatrix(Minv @ itc.P, Minv @ itc.D)


def slowestRate(model, itc):
    '''Slowest decay rate of the linearized closed loop, or None'''
    A = linearizedClosedLoop(model, itc)
    if A is None:
        return None
    real = np.linalg.eigvals(A).real
    if np.max(real) >= 0:
        return None
    return float(-np.max(real))


def suffixStart(ok):
    '''Index of the first sample after which ok holds through the end, len(ok) if ok[-1] is False'''
    tail = np.flip(np.logical_and.accumulate(np.flip(ok)))
    idx = np.flatnonzero(tail)
    return int(idx[0]) if len(idx) else len(ok)


@dataclass
class AssumptionReport:
    """
    Outcome of the convergence-rate assumption check along an infinite-time run

    Attributes:
        satisfied (bool): True if tTilde < horizon/2
        tTilde (float): earliest time after which the velocity bound and one acceleration or control bound hold, inf if none
        whichBranch (str): 'AccelBound', 'ControlBound', 'Both' or None
        margins (dict): 'velocity' mu' - ||qd||, 'accel' mu'^2 - ||qdd||, 'control' mu'^2 - ||f||
        horizon (float): checked horizon in s
        times (ndarray): elapsed times of the samples
        rho (float): fitted coefficient of ||qdd|| <= rho exp(-rate t)
        rate (float): fitted decay rate
    """
    satisfied: bool
    tTilde: float
    whichBranch: str
    margins: dict
    horizon: float
    times: np.ndarray = field(repr=False, default=None)
    rho: float = None
    rate: float = None

    def summary(self):
        return {'satisfied': self.satisfied, 't_tilde': self.tTilde, 'branch': self.whichBranch,
                'horizon': self.horizon, 'rho': self.rho, 'rate': self.rate,
                'min_velocity_margin': float(np.min(self.margins['velocity'])),
                'min_accel_margin': float(np.min(self.margins['accel'])),
                'min_control_margin': float(np.min(self.margins['control']))}


def defaultHorizon(model, itc):
    rate = slowestRate(model, itc)
    return 200.0 if rate is None else 10.0 / rate


def checkRateCondition(model, itc, mu, x0, horizon=None, step=1e-2, t0=0.0, traj=None, verbose=False):
    '''
    Check the convergence-rate assumption on a simulated nominal run

    The assumption asks for a time t~ after which ||qd|| <= mu' and either
    ||qdd|| <= mu'^2 or ||f|| <= mu'^2, all at the elapsed time t - t0. The
    finite-horizon proxy accepts when such a t~ exists below horizon/2.
    Accelerations are recovered from the model at the sample points.

    Args:
        model (EulerLagrangeModel): the system
        itc (ControlLaw): infinite-time controller
        mu (MuMap or KappaMap): candidate class M mapping
        x0 (tuple): initial (q, qd)
        horizon (float, optional): checked duration, 10 slowest time constants by default, else 200 s
        step (float, optional): integration step
        t0 (float, optional): initial time
        traj (Trajectory, optional): nominal run to reuse instead of simulating
        verbose (bool, optional): True for progress output

    Returns:
        report (AssumptionReport): the verdict with margins

    Raises:
        SimulationDiverged: if the nominal run diverges
    '''
    mu = mu if isinstance(mu, MuMap) else MuMap(mu)
    if traj is None:
        if horizon is None:
            horizon = defaultHorizon(model, itc)
        traj = integrate(model, itc, x0, t0=t0, horizon=horizon, step=step, verbose=verbose)
    else:
        span = traj.times[-1] - traj.times[0]
        horizon = span if horizon is None else min(horizon, span)
        traj = traj.truncate(int(np.searchsorted(traj.times, traj.times[0] + horizon * (1 + 1e-12), 'right')))
    elapsed = traj.times - traj.times[0]

    qdn = np.linalg.norm(traj.qd, axis=1)
    fn = np.linalg.norm(traj.u, axis=1)
    qdd = np.array([forwardDynamics(model, traj.q[k], traj.qd[k], traj.u[k]) for k in range(len(traj))])
    qddn = np.linalg.norm(qdd, axis=1)
    _m, d1, _d2 = evalMu(mu, elapsed)

    margins = {'velocity': d1 - qdn, 'accel': d1 ** 2 - qddn, 'control': d1 ** 2 - fn}
    iv = suffixStart(margins['velocity'] >= 0)
    ia = max(iv, suffixStart(margins['accel'] >= 0))
    ic = max(iv, suffixStart(margins['control'] >= 0))
    it = min(ia, ic)
    tTilde = float(elapsed[it]) if it < len(elapsed) else np.inf
    satisfied = tTilde < horizon / 2
    branch = None
    if satisfied:
        branches = [name for name, i in (('AccelBound', ia), ('ControlBound', ic)) if i <= it]
        branch = 'Both' if len(branches) == 2 else branches[0]
    rho, rate = fitEnvelope(elapsed, qddn)
    if verbose:
        print(f'Assumption check: t_tilde={tTilde:g}, satisfied={satisfied}, branch={branch}, rho={rho:.3g}, rate={rate:.3g}')
    return AssumptionReport(bool(satisfied), tTilde, branch, margins, float(horizon), elapsed, rho, rate)


@dataclass
class AuxiliaryDecayReport:
    """
    Finite-horizon proxy for the limits -eta''/eta'^alpha ||r|| -> 0 and ||r||/eta'^alpha -> 0

    Attributes:
        passed (bool): both tail quantities decay
        premise (bool): ||r|| <= mu' held on the tail
        accelTerm (ndarray): -eta''/eta'^alpha ||r|| on the tail
        ratioTerm (ndarray): ||r||/eta'^alpha on the tail
        accelDecays (bool): accelTerm is nonincreasing and ends at or below 10% of its maximum
        ratioDecays (bool): the same for ratioTerm
    """
    passed: bool
    premise: bool
    accelTerm: np.ndarray = field(repr=False)
    ratioTerm: np.ndarray = field(repr=False)
    accelDecays: bool
    ratioDecays: bool


def decaysOnTail(values, rtol=1e-9, final=0.1):
    '''Nonincreasing within rtol and ending at or below final times the maximum, or identically zero'''
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        return False
    top = np.max(np.abs(values))
    if top == 0:
        return True
    steps = values[1:] <= values[:-1] + rtol * np.abs(values[:-1])
    return bool(np.all(steps) and values[-1] <= final * top)


def _derivatives(eta, s):
    if isinstance(eta, (MuMap, KappaMap)):
        return evalMu(eta, s)
    return eta(s)


def auxiliaryDecayCheck(times, r, mu, eta, alpha=1.0, horizon=None):
    '''
    Check the decay conditions of the auxiliary mapping on the last decade

    Evaluates -eta''/eta'^alpha ||r|| and ||r||/eta'^alpha on [horizon/10, horizon]
    and requires both to decrease toward zero.

    Args:
        times (ndarray): elapsed sample times
        r (ndarray): (N,) norms or (N, m) vectors
        mu (MuMap or KappaMap): mapping bounding ||r|| <= mu'
        eta (MuMap, KappaMap or function): auxiliary mapping, or a function s -> (eta, eta', eta'')
        alpha (float, optional): exponent, at least 1
        horizon (float, optional): end of the checked span, last time by default

    Returns:
        report (AuxiliaryDecayReport): the tail quantities and verdict
    '''
    if alpha < 1:
        raise ValueError(f'alpha must be at least 1, got {alpha}')
    times = np.asarray(times, dtype=float)
    r = np.asarray(r, dtype=float)
    rn = np.linalg.norm(r, axis=1) if r.ndim == 2 else np.abs(r)
    horizon = times[-1] if horizon is None else horizon
    tail = (times >= horizon / 10) & (times <= horizon)
    s = times[tail]
    rt = rn[tail]
    _e, e1, e2 = _derivatives(eta, s)
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        accel = np.where(rt == 0, 0.0, -e2 / e1 ** alpha * rt)
        ratio = np.where(rt == 0, 0.0, rt / e1 ** alpha)
    premise = bool(np.all(rt <= np.asarray(evalMu(mu, s)[1]) * (1 + 1e-12)))
    accelDecays = decaysOnTail(accel)
    ratioDecays = decaysOnTail(ratio)
    if not premise:
        log.info('premise ||r|| <= mu\' fails on the tail')
    return AuxiliaryDecayReport(accelDecays and ratioDecays, premise, accel, ratio, accelDecays, ratioDecays)
