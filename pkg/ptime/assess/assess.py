import logging
from dataclasses import dataclass, field

import numpy as np

from ptime.timewarp import MuMap, evalKappa, evalMu
from ptime.sim import Trajectory
from ptime.verify.assumption import suffixStart

log = logging.getLogger(__name__)


def mappedControl(model, q, qd, f, d1, d2):
    '''
    Prescribed-time control written with infinite-time signals

    l = f/mu'^2 - mu''/mu'^3 M(q) qd + (1 - 1/mu'^2) g(q), with qd the
    infinite-time velocity.
    '''
    return f / d1 ** 2 - d2 / d1 ** 3 * (model.mass(q) @ qd) + (1 - 1 / d1 ** 2) * model.gravity(q)


def warpTrajectory(traj_itc, mu, model=None):
    '''
    Predict the prescribed-time trajectory from an infinite-time run

    Sample k moves to t0 + mu(t_k - t0) with the same positions and velocities
    divided by mu'(t_k - t0). Samples whose mu' has underflowed to zero are
    dropped. With a model the control column holds the mapped control,
    otherwise it is NaN.

    Args:
        traj_itc (Trajectory): infinite-time run starting at t0
        mu (MuMap or KappaMap): class M mapping
        model (EulerLagrangeModel, optional): model used for the mapped control

    Returns:
        traj (Trajectory): warped samples on a nonuniform grid, meta['domain'] = 'warped'

    Examples:
        >>> import numpy as np
        >>> from ptime.sim import Trajectory
        >>> from ptime.timewarp import rationalSum
        >>> from ptime.assess import warpTrajectory
        >>> t = np.array([0.0, 20.0])
        >>> z = np.zeros((2, 1))
        >>> warpTrajectory(Trajectory(t, z, z, z, z), rationalSum([(20, 1, 1)], 20)).times
        array([ 0., 10.])
    '''
    mu = mu if isinstance(mu, MuMap) else MuMap(mu)
    t0 = traj_itc.times[0]
    s = traj_itc.times - t0
    m, d1, d2 = evalMu(mu, s)
    keep = d1 > 0
    q = traj_itc.q[keep]
    qd = traj_itc.qd[keep]
    scale = d1[keep][:, None]
    if model is None:
        u = np.full_like(q, np.nan)
    else:
        f, s1, s2 = traj_itc.u[keep], d1[keep], d2[keep]
        u = np.array([mappedControl(model, q[k], qd[k], f[k], s1[k], s2[k]) for k in range(len(q))])
    events = [(kind, t0 + evalMu(mu, t - t0)[0]) for kind, t in traj_itc.events]
    meta = dict(traj_itc.meta)
    meta['domain'] = 'warped'
    return Trajectory(t0 + m[keep], q, qd / scale, u, np.zeros_like(q), events, meta)


def unwarpTrajectory(traj_ptc, kappa):
    '''
    Map a prescribed-time trajectory back to the infinite-time domain

    Sample k moves to t0 + kappa(t_k - t0) with velocities divided by
    kappa'(t_k - t0). Samples at or beyond the horizon are dropped.

    Args:
        traj_ptc (Trajectory): prescribed-time run starting at t0
        kappa (KappaMap): the mapping

    Returns:
        traj (Trajectory): unwarped samples, meta['domain'] = 'itc'
    '''
    t0 = traj_ptc.times[0]
    s = traj_ptc.times - t0
    keep = s < kappa.tau * (1 - 1e-12)
    k, d1, _d2 = evalKappa(kappa, s[keep])
    meta = dict(traj_ptc.meta)
    meta['domain'] = 'itc'
    q = traj_ptc.q[keep]
    events = [(kind, t0 + evalKappa(kappa, t - t0)[0]) for kind, t in traj_ptc.events if t - t0 < kappa.tau * (1 - 1e-12)]
    return Trajectory(t0 + k, q, traj_ptc.qd[keep] / d1[:, None], traj_ptc.u[keep], traj_ptc.d[keep], events, meta)


class MappedOutput():
    """
    Output V(qd, q, mu) = W(qd/kappa'(mu), q, kappa(mu)) of the prescribed-time loop

    Args:
        W (function): output (qd, q, t) -> value of the infinite-time loop
        kappa (KappaMap): the mapping, with t0 = 0
    """

    def __init__(self, W, kappa):
        self.W = W
        self.kappa = kappa

    def __call__(self, qd, q, t):
        k, d1, _d2 = evalKappa(self.kappa, t)
        return self.W(np.asarray(qd) / d1, q, k)


def mapOutput(W, kappa):
    '''
    Output of the prescribed-time loop matching an output of the infinite-time loop

    Args:
        W (function): output (qd, q, t) -> m-vector or scalar
        kappa (KappaMap): the mapping, with t0 = 0

    Returns:
        V (MappedOutput): output (qd, q, mu) -> W(qd/kappa'(mu), q, kappa(mu))

    Raises:
        NonFinite: when V is evaluated within tau*1e-12 of the horizon
    '''
    return MappedOutput(W, kappa)


class EnergyOutput():
    """
    W = 0.5 qd^T M(q) qd - 0.5 q_e^T P q_e, the energy-like function of a PD loop

    Args:
        model (EulerLagrangeModel): the system
        P (ndarray): negative definite position gain
        target (ndarray): desired configuration
    """

    def __init__(self, model, P, target):
        self.model = model
        self.P = np.asarray(P, dtype=float)
        self.target = np.asarray(target, dtype=float)

    def __call__(self, qd, q, t=0.0):
        e = np.asarray(q) - self.target
        return 0.5 * qd @ self.model.mass(q) @ qd - 0.5 * e @ self.P @ e


@dataclass
class EquivalenceReport:
    """
    Cross-domain comparison of V along a prescribed-time run with W along an infinite-time run

    Attributes:
        times (ndarray): prescribed-time sample times used
        V (ndarray): V along the prescribed-time run
        W (ndarray): W at the mapped times kappa(t) along the infinite-time run
        maxMismatch (float): max |V - W|
        tolerance (float): 5e-3 (1 + max |W|) by default
        signMismatches (int): derivative sign disagreements outside the excluded windows
    """
    times: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    maxMismatch: float
    tolerance: float
    signMismatches: int

    @property
    def equivalent(self):
        return self.maxMismatch <= self.tolerance

    @property
    def signPreserved(self):
        return self.signMismatches == 0

    @property
    def passed(self):
        return self.equivalent and self.signPreserved


def signMismatches(dV, dW, window=10, atol=0.0):
    '''
    Count samples where the signs of two difference sequences disagree

    Samples within window of a sign change of either sequence are skipped, as
    are samples where either difference is within atol of zero.
    '''
    sV = np.where(np.abs(dV) <= atol, 0, np.sign(dV))
    sW = np.where(np.abs(dW) <= atol, 0, np.sign(dW))
    skip = np.zeros(len(dV), dtype=bool)
    for s in (sV, sW):
        nz = np.flatnonzero(s)
        changes = nz[1:][s[nz[1:]] != s[nz[:-1]]]
        for c in changes:
            skip[max(c - window, 0):c + window + 1] = True
    bad = (sV != sW) & (sV != 0) & (sW != 0) & ~skip
    return int(np.sum(bad))


def outputEquivalence(W, traj_itc, traj_ptc, kappa, window=10, rtol=5e-3):
    '''
    Compare V = mapOutput(W, kappa) along a prescribed-time run with W along an infinite-time run

    Both runs start at t = 0. Prescribed-time samples are used up to the
    time the infinite-time run covers; the infinite-time states are linearly
    interpolated at kappa(t). Vector outputs are compared componentwise.

    Args:
        W (function): output (qd, q, t) -> value
        traj_itc (Trajectory): infinite-time run
        traj_ptc (Trajectory): prescribed-time run
        kappa (KappaMap): the mapping
        window (int, optional): samples skipped around sign changes
        rtol (float, optional): tolerance factor on 1 + max |W|

    Returns:
        report (EquivalenceReport): mismatch and sign agreement
    '''
    V = mapOutput(W, kappa)
    span = traj_itc.times[-1] - traj_itc.times[0]
    limit = evalMu(kappa, span)[0]
    t = traj_ptc.times - traj_ptc.times[0]
    keep = t <= min(limit, kappa.tau * (1 - 1e-12))
    t = t[keep]
    s, _d1, _d2 = evalKappa(kappa, t)
    qi, qdi = traj_itc.sample(traj_itc.times[0] + s)
    Vs = np.array([V(traj_ptc.qd[keep][k], traj_ptc.q[keep][k], t[k]) for k in range(len(t))])
    Ws = np.array([W(qdi[k], qi[k], s[k]) for k in range(len(t))])
    Vs = Vs.reshape(len(t), -1)
    Ws = Ws.reshape(len(t), -1)
    scale = float(np.max(np.abs(Ws))) if Ws.size else 0.0
    mismatch = float(np.max(np.abs(Vs - Ws))) if Ws.size else 0.0
    count = 0
    for j in range(Ws.shape[1]):
        count += signMismatches(np.diff(Vs[:, j]), np.diff(Ws[:, j]), window, 1e-12 * (1 + scale))
    return EquivalenceReport(t, Vs.squeeze(), Ws.squeeze(), mismatch, rtol * (1 + scale), count)


def controlMagnitudeBound(traj_itc, mu, model):
    '''
    Normalized prescribed-time control magnitude along an infinite-time run

    Returns:
        times, magnitude, Mnorm (ndarray): elapsed times, ||l~|| with
            l~ = f~/mu'^2 - mu''/mu'^3 M(q) qd and f~ = f - g, and ||M(q)||
    '''
    mu = mu if isinstance(mu, MuMap) else MuMap(mu)
    s = traj_itc.times - traj_itc.times[0]
    _m, d1, d2 = evalMu(mu, s)
    mag = np.zeros(len(s))
    Mnorm = np.zeros(len(s))
    for k in range(len(s)):
        q, qd = traj_itc.q[k], traj_itc.qd[k]
        M = model.mass(q)
        ft = traj_itc.u[k] - model.gravity(q)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            lt = ft / d1[k] ** 2 - d2[k] / d1[k] ** 3 * (M @ qd)
        mag[k] = np.linalg.norm(lt) if np.all(np.isfinite(lt)) else np.inf
        Mnorm[k] = np.linalg.norm(M, 2)
    return s, mag, Mnorm


@dataclass
class MembershipReport:
    """
    Membership of a mapping in the sets bounding the normalized control

    Attributes:
        inMPrime (bool): ||f~|| < mu'^2 from tTilde on
        inMDoublePrime (bool): ||qd|| < -mu''/mu'^3 from tTilde on
        delta (float): max over [tTilde, end] of ||f~||/mu'^2 and ||qd||/(-mu''/mu'^3)
        tTilde (float): elapsed time after which both conditions hold, inf if never
        observed (float): max over [tTilde, end] of ||l~||/(1 + ||M||)
    """
    inMPrime: bool
    inMDoublePrime: bool
    delta: float
    tTilde: float
    observed: float

    @property
    def certified(self):
        return self.inMPrime and self.inMDoublePrime and self.delta < 1


def muMembershipCheck(traj_itc, mu, model, horizon=None):
    '''
    Check the pointwise conditions behind the normalized control bound ||l~|| <= delta (1 + ||M||)

    Conditions are required to hold from some time below horizon/2 through
    the end of the run, as in the convergence-rate check.

    Args:
        traj_itc (Trajectory): nominal infinite-time run
        mu (MuMap or KappaMap): class M mapping
        model (EulerLagrangeModel): the system
        horizon (float, optional): checked span, the whole run by default

    Returns:
        report (MembershipReport): flags, delta and the observed normalized magnitude
    '''
    mu = mu if isinstance(mu, MuMap) else MuMap(mu)
    s = traj_itc.times - traj_itc.times[0]
    horizon = s[-1] if horizon is None else horizon
    keep = s <= horizon
    s = s[keep]
    _m, d1, d2 = evalMu(mu, s)
    ft = np.array([traj_itc.u[k] - model.gravity(traj_itc.q[k]) for k in range(len(s))])
    ftn = np.linalg.norm(ft, axis=1)
    qdn = np.linalg.norm(traj_itc.qd[keep], axis=1)
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        r1 = np.where(ftn == 0, 0.0, ftn / d1 ** 2)
        bend = -d2 / d1 ** 3
        r2 = np.where(qdn == 0, 0.0, np.where(bend > 0, qdn / bend, np.inf))
    r1 = np.nan_to_num(r1, nan=np.inf)
    r2 = np.nan_to_num(r2, nan=np.inf)
    i1 = suffixStart(r1 < 1)
    i2 = suffixStart(r2 < 1)
    inM1 = i1 < len(s) and s[i1] < horizon / 2
    inM2 = i2 < len(s) and s[i2] < horizon / 2
    it = max(i1, i2)
    if it >= len(s):
        return MembershipReport(bool(inM1), bool(inM2), np.inf, np.inf, np.inf)
    delta = float(max(np.max(r1[it:]), np.max(r2[it:])))
    _t, mag, Mnorm = controlMagnitudeBound(traj_itc.truncate(len(s)), mu, model)
    observed = float(np.max(mag[it:] / (1 + Mnorm[it:])))
    return MembershipReport(bool(inM1), bool(inM2), delta, float(s[it]), observed)


def warpMismatch(warped, traj_ptc):
    '''
    Sup-norm distance between a warped infinite-time run and a prescribed-time run

    The prescribed-time run is linearly interpolated at the warped sample
    times that fall inside its span.

    Args:
        warped (Trajectory): output of warpTrajectory
        traj_ptc (Trajectory): prescribed-time run from the same initial state

    Returns:
        qErr, qdErr (float): max position and velocity mismatch over the common grid
    '''
    keep = (warped.times >= traj_ptc.times[0]) & (warped.times <= traj_ptc.times[-1])
    if not np.any(keep):
        return 0.0, 0.0
    q, qd = traj_ptc.sample(warped.times[keep])
    return float(np.max(np.abs(q - warped.q[keep]))), float(np.max(np.abs(qd - warped.qd[keep])))
