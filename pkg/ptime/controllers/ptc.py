import logging
import warnings

import numpy as np

from ptime.errors import DomainError, MappingWarning
from ptime.timewarp import evalKappa, validateClass
from ptime.controllers.core import ControlLaw, LawKind, checkNegativeDefinite

log = logging.getLogger(__name__)


def checkMapping(kappa):
    '''
    Require class K(tau), warn when the map is not class K1(tau)

    Raises:
        DomainError: if the map fails the class K checks
    '''
    report = validateClass(kappa, 'K1')
    base = ('zero', 'monotone', 'divergent')
    if not all(report.checks[name] for name in base):
        raise DomainError(f'mapping is not class K: {report.checks}')
    if not report.passed:
        warnings.warn(f'mapping is class K but not K1 ({report.checks}); the prescribed-time '
                      'trajectory only matches the warped one after scaling the initial velocity by kappa\'(0)',
                      MappingWarning, stacklevel=3)
    return report


def warpCoefficients(kappa, dt):
    '''Return (kappa', kappa''/kappa') at elapsed time dt'''
    _k, d1, d2 = evalKappa(kappa, dt)
    return d1, d2 / d1


def synthesize(itc, model, d1, ratio, qd, q):
    '''Time-varying law d1^2 f(qd/d1, q) + ratio M(q) qd + (1 - d1^2) g(q)'''
    f = itc.evaluate(qd / d1, q, 0.0)
    return d1 ** 2 * f + ratio * (model.mass(q) @ qd) + (1 - d1 ** 2) * model.gravity(q)


class PTCLaw(ControlLaw):
    """
    Prescribed-time controller obtained from an infinite-time controller f

    For t0 <= t < t0 + tau with dt = t - t0

        h = kappa'(dt)^2 f(qd/kappa'(dt), q) + kappa''(dt)/kappa'(dt) M(q) qd + (1 - kappa'(dt)^2) g(q)

    and h = f(qd, q) for t >= t0 + tau.
    """
    kind = LawKind.PTC

    def __init__(self, itc, model, kappa, t0=0.0):
        super().__init__(model, itc.target, itc.P, itc.D)
        self.itc = itc
        self._kappa = kappa
        self.t0 = float(t0)

    @property
    def kappa(self):
        return self._kappa

    @property
    def tau(self):
        return self._kappa.tau

    def coefficients(self, t):
        '''(kappa', kappa''/kappa') at time t, (1, 0) once the horizon has passed'''
        dt = t - self.t0
        if dt >= self.tau:
            return 1.0, 0.0
        return warpCoefficients(self._kappa, dt)

    def evaluate(self, qd, q, t):
        if t - self.t0 >= self.tau:
            return self.itc.evaluate(qd, q, t)
        d1, ratio = self.coefficients(t)
        return synthesize(self.itc, self.model, d1, ratio, qd, q)

    @property
    def metadata(self):
        meta = super().metadata
        meta.update({'kappa': self._kappa, 't0': self.t0, 'tau': self.tau})
        return meta

    def toDict(self):
        d = self.itc.toDict()
        d['kind'] = self.kind.value
        d['kappa'] = self._kappa.toDict()
        d['t0'] = self.t0
        return d


class SwitchingPTCLaw(PTCLaw):
    """
    Prescribed-time controller with bounded gains

    While (q, qd, t) stays in S = {t <= t0 + tau - epsilon, ||e|| >= sigma}
    the law follows the prescribed-time controller with the live elapsed time.
    On leaving S the switching time t_s is latched and the coefficients are
    frozen at dt_s = t_s - t0 from then on. e is the error state [q - q_d, qd],
    or [q, qd] when literal_norm is set.
    """
    kind = LawKind.PTC_SWITCHING

    def __init__(self, itc, model, kappa, t0=0.0, epsilon=1.0, sigma=0.0, literal_norm=False):
        super().__init__(itc, model, kappa, t0)
        if not 0 < epsilon < kappa.tau:
            raise DomainError(f'epsilon must lie in (0, tau={kappa.tau}), got {epsilon}')
        if sigma < 0:
            raise DomainError(f'sigma must be nonnegative, got {sigma}')
        self.epsilon = float(epsilon)
        self.sigma = float(sigma)
        self.literal_norm = literal_norm
        self.ts = None

    @property
    def switchTime(self):
        '''Time-triggered switching time t0 + tau - epsilon'''
        return self.t0 + self.tau - self.epsilon

    def errorNorm(self, qd, q):
        e = q if self.literal_norm else q - self.target
        return float(np.sqrt(e @ e + qd @ qd))

    def pendingSwitch(self, qd, q, t):
        '''Time the law would latch at if it were updated at (qd, q, t), or None while in S'''
        if self.ts is not None:
            return self.ts
        if t >= self.switchTime:
            return self.switchTime
        if self.errorNorm(qd, q) < self.sigma:
            return t
        return None

    def coefficients(self, t, ts=None):
        ts = self.ts if ts is None else ts
        if ts is not None:
            return warpCoefficients(self._kappa, ts - self.t0)
        return super().coefficients(min(t, self.switchTime))

    def evaluate(self, qd, q, t):
        ts = self.pendingSwitch(qd, q, t)
        d1, ratio = self.coefficients(t, ts)
        return synthesize(self.itc, self.model, d1, ratio, qd, q)

    def latch(self, qd, q, t):
        if self.ts is not None:
            return None
        ts = self.pendingSwitch(qd, q, t)
        if ts is None:
            return None
        self.ts = ts
        log.debug('gains frozen at t_s=%g (dt_s=%g)', ts, ts - self.t0)
        return ('GainSwitch', ts)

    def reset(self):
        self.ts = None

    @property
    def metadata(self):
        meta = super().metadata
        meta.update({'epsilon': self.epsilon, 'sigma': self.sigma, 'ts': self.ts})
        return meta

    def toDict(self):
        d = super().toDict()
        d.update({'epsilon': self.epsilon, 'sigma': self.sigma})
        if self.literal_norm:
            d['literal_norm'] = True
        return d


def ptcSynthesize(itc, model, kappa, t0=0.0):
    '''
    Prescribed-time controller from an infinite-time controller

    Args:
        itc (ControlLaw): infinite-time controller f(qd, q)
        model (EulerLagrangeModel): the system
        kappa (KappaMap): class K1(tau) mapping, class K is accepted with a MappingWarning
        t0 (float, optional): start of the prescribed interval in s

    Returns:
        law (PTCLaw): the prescribed-time controller

    Raises:
        DomainError: if kappa is not class K(tau)

    Examples:
        >>> import numpy as np
        >>> from ptime.dynamics import twoLinkModel
        >>> from ptime.timewarp import rationalSum
        >>> from ptime.controllers import pdGravityITC, ptcSynthesize
        >>> model = twoLinkModel()
        >>> itc = pdGravityITC(model, -0.1*np.eye(2), -np.eye(2), [np.pi/2, 0])
        >>> ptc = ptcSynthesize(itc, model, rationalSum([(20, 1, 1)], 20))
        >>> x = np.zeros(2)
        >>> np.allclose(ptc(x, x, 21.0), itc(x, x))
        True
    '''
    checkMapping(kappa)
    return PTCLaw(itc, model, kappa, t0)


def ptcSwitching(itc, model, kappa, t0=0.0, epsilon=1.0, sigma=0.0, literal_norm=False):
    '''
    Prescribed-time controller with gain switching

    Args:
        itc (ControlLaw): infinite-time controller
        model (EulerLagrangeModel): the system
        kappa (KappaMap): class K1(tau) mapping
        t0 (float, optional): start of the prescribed interval in s
        epsilon (float, optional): switch no later than t0 + tau - epsilon, 0 < epsilon < tau
        sigma (float, optional): switch as soon as the error norm drops below sigma
        literal_norm (bool, optional): measure ||[q, qd]|| instead of the error state

    Returns:
        law (SwitchingPTCLaw): the switching controller, one instance per simulation run
    '''
    checkMapping(kappa)
    return SwitchingPTCLaw(itc, model, kappa, t0, epsilon, sigma, literal_norm)


def gainSchedules(P, D, model, kappa, t, q, t0=0.0):
    '''
    Time-varying gains of the prescribed-time PD controller with gravity compensation

    P~ = kappa'^2 P and D~ = kappa' D + kappa''/kappa' M(q) for t < t0 + tau,
    P~ = P and D~ = D afterwards.

    Args:
        P (ndarray): position gain
        D (ndarray): velocity gain
        model (EulerLagrangeModel): the system
        kappa (KappaMap): the mapping
        t (float): time in s
        q (ndarray): configuration in rad
        t0 (float, optional): start of the prescribed interval

    Returns:
        Pt, Dt (ndarray): scheduled gains

    Examples:
        >>> import numpy as np
        >>> from ptime.dynamics import twoLinkModel
        >>> from ptime.timewarp import rationalSum
        >>> from ptime.controllers import gainSchedules
        >>> Pt, Dt = gainSchedules(-0.1*np.eye(2), -np.eye(2), twoLinkModel(), rationalSum([(20, 1, 1)], 20), 0.0, np.zeros(2))
        >>> Dt
        array([[-0.684,  0.033],
               [ 0.033, -0.967]])
    '''
    if t - t0 >= kappa.tau:
        return np.asarray(P, dtype=float), np.asarray(D, dtype=float)
    d1, ratio = warpCoefficients(kappa, t - t0)
    return d1 ** 2 * P, d1 * D + ratio * model.mass(q)


def feedbackLinearizationSchedules(P, D, kappa, t, t0=0.0):
    '''
    Gains of the prescribed-time feedback linearizing controller

    P~ = kappa'^2 P and D~ = kappa' D + kappa''/kappa' I for t < t0 + tau,
    P~ = P and D~ = D afterwards.
    '''
    P = np.asarray(P, dtype=float)
    D = np.asarray(D, dtype=float)
    if t - t0 >= kappa.tau:
        return P, D
    d1, ratio = warpCoefficients(kappa, t - t0)
    return d1 ** 2 * P, d1 * D + ratio * np.eye(P.shape[0])


class ScheduledPDGravity(ControlLaw):
    """u = P~(t) q_e + D~(t) qd + g(q) + kappa'(t)^2 gamma(q)"""
    kind = LawKind.PTC

    def __init__(self, model, P, D, target, kappa, t0=0.0, limit=None):
        super().__init__(model, target, checkNegativeDefinite(P, 'P'), checkNegativeDefinite(D, 'D'))
        self._kappa = kappa
        self.t0 = t0
        self.limit = limit

    @property
    def kappa(self):
        return self._kappa

    def evaluate(self, qd, q, t):
        Pt, Dt = gainSchedules(self.P, self.D, self.model, self._kappa, t, q, self.t0)
        u = Pt @ (q - self.target) + Dt @ qd + self.model.gravity(q)
        if self.limit is not None:
            d1 = warpCoefficients(self._kappa, t - self.t0)[0] if t - self.t0 < self._kappa.tau else 1.0
            u = u + d1 ** 2 * self.limit(q)
        return u


class ScheduledFeedbackLinearization(ControlLaw):
    """u = C(qd, q) qd + g(q) + M(q)(P~(t) q_e + D~(t) qd)"""
    kind = LawKind.PTC

    def __init__(self, model, P, D, target, kappa, t0=0.0):
        super().__init__(model, target, checkNegativeDefinite(P, 'P'), checkNegativeDefinite(D, 'D'))
        self._kappa = kappa
        self.t0 = t0

    @property
    def kappa(self):
        return self._kappa

    def evaluate(self, qd, q, t):
        Pt, Dt = feedbackLinearizationSchedules(self.P, self.D, self._kappa, t, self.t0)
        model = self.model
        return model.coriolis(qd, q) @ qd + model.gravity(q) + model.mass(q) @ (Pt @ (q - self.target) + Dt @ qd)


def scheduledPDGravity(model, P, D, target, kappa, t0=0.0, limit=None):
    '''Prescribed-time PD controller with gravity compensation written with scheduled gains'''
    return ScheduledPDGravity(model, P, D, target, kappa, t0, limit)


def scheduledFeedbackLinearization(model, P, D, target, kappa, t0=0.0):
    '''Prescribed-time feedback linearizing controller written with scheduled gains'''
    return ScheduledFeedbackLinearization(model, P, D, target, kappa, t0)


def ptcInitialState(kappa, q0, qd0):
    '''
    Initial state of the prescribed-time run matching an infinite-time run

    Positions are shared and velocities scale by kappa'(0), which is the
    identity for class K1 maps.
    '''
    d1 = evalKappa(kappa, 0.0)[1]
    return np.asarray(q0, dtype=float), d1 * np.asarray(qd0, dtype=float)
