import logging
from time import time

import numpy as np

from ptime.errors import NonFinite, SimulationDiverged
from ptime.dynamics import forwardDynamics
from ptime.sim.trajectory import Trajectory
from ptime.sim.disturbance import DisturbanceModel

log = logging.getLogger(__name__)

HOLDS = ('stage', 'zoh')


def integrate(model, law, x0, t0=0.0, horizon=20.0, step=1e-3, disturbance=None, hold='stage',
              diverge=1e6, meta=None, verbose=False):
    '''
    Fixed-step fourth-order Runge-Kutta simulation of the closed loop

    The disturbance is sampled at the start of each step and held over it.
    With hold='stage' the law is evaluated at every Runge-Kutta stage, with
    hold='zoh' it is sampled at the step start and held. Switching laws are
    latched only at step boundaries and each latch is recorded as an event.

    Args:
        model (EulerLagrangeModel): the system
        law (ControlLaw): the feedback law, mutated only through law.latch
        x0 (tuple): initial (q, qd)
        t0 (float, optional): initial time in s
        horizon (float, optional): simulated duration in s
        step (float, optional): integration step in s
        disturbance (DisturbanceModel, optional): matched disturbance, none by default
        hold (str, optional): 'stage' or 'zoh'
        diverge (float, optional): state norm treated as divergence
        meta (dict, optional): descriptor stored on the trajectory
        verbose (bool, optional): True for progress output

    Returns:
        traj (Trajectory): samples at t0 + k*step, k = 0..round(horizon/step). If
            the law raises NonFinite the run stops and the partial trajectory
            carries a ('Diverged', t) event.

    Raises:
        SimulationDiverged: if the state norm exceeds diverge or becomes non-finite;
            the partial trajectory is attached to the exception

    Examples:
        >>> import numpy as np
        >>> from ptime.dynamics import twoLinkModel
        >>> from ptime.controllers import pdGravityITC
        >>> from ptime.sim import integrate
        >>> model = twoLinkModel()
        >>> itc = pdGravityITC(model, -0.1*np.eye(2), -np.eye(2), [np.pi/2, 0])
        >>> traj = integrate(model, itc, (np.zeros(2), np.zeros(2)), horizon=1.0, step=1e-2)
        >>> traj.q.shape
        (101, 2)
    '''
    if not step > 0:
        raise ValueError(f'step must be positive, got {step}')
    if hold not in HOLDS:
        raise ValueError(f'hold must be one of {HOLDS}, got {hold}')
    n = model.n
    count = int(round(horizon / step))
    times = t0 + step * np.arange(count + 1)
    if disturbance is None:
        disturbance = DisturbanceModel()
    dpath = disturbance.path(step, count + 1, n)

    qs = np.zeros((count + 1, n))
    qds = np.zeros((count + 1, n))
    us = np.zeros((count + 1, n))
    events = []
    meta = dict(meta or {})
    meta.setdefault('law', law.kind.value)
    meta.setdefault('disturbance', disturbance.toDict())

    q = np.array(x0[0], dtype=float)
    qd = np.array(x0[1], dtype=float)
    h = step
    half = 0.5 * step

    def partial(k):
        return Trajectory(times[:k + 1].copy(), qs[:k + 1].copy(), qds[:k + 1].copy(), us[:k + 1].copy(),
                          dpath[:k + 1].copy(), events, meta)

    if verbose:
        print(f'Integrating {count} steps of {step:g} s')
        start_time = time()
    last = 0
    try:
        for k in range(count + 1):
            t = times[k]
            event = law.latch(qd, q, t)
            if event is not None:
                events.append(event)
                log.info('%s at t=%g', *event)
            u = law.evaluate(qd, q, t)
            qs[k], qds[k], us[k] = q, qd, u
            last = k
            if k == count:
                break
            d = dpath[k]
            if hold == 'zoh':
                accel = lambda qq, vv, tt: forwardDynamics(model, qq, vv, u, d)
            else:
                accel = lambda qq, vv, tt: forwardDynamics(model, qq, vv, law.evaluate(vv, qq, tt), d)
            k1v = accel(q, qd, t)
            k2q = qd + half * k1v
            k2v = accel(q + half * qd, k2q, t + half)
            k3q = qd + half * k2v
            k3v = accel(q + half * k2q, k3q, t + half)
            k4q = qd + h * k3v
            k4v = accel(q + h * k3q, k4q, t + h)
            q = q + h / 6 * (qd + 2 * k2q + 2 * k3q + k4q)
            qd = qd + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
            norm = np.sqrt(q @ q + qd @ qd)
            if not norm <= diverge:
                t_last = float(times[k])
                events.append(('Diverged', t_last))
                raise SimulationDiverged(f'state norm {norm:.3g} exceeded {diverge:g} in the step after t={t_last:g}',
                                         trajectory=partial(k), t=t_last)
            if verbose and (k + 1) % max(count // 10, 1) == 0:
                print(f't={times[k + 1]:.3f}  |q|={np.linalg.norm(q):.6g}  |qd|={np.linalg.norm(qd):.6g}')
    except NonFinite as e:
        events.append(('Diverged', float(times[last])))
        log.warning('law became non-finite after t=%g: %s', times[last], e)
        return partial(last)

    if verbose:
        print('Integration Time:', time() - start_time)
    return Trajectory(times, qs, qds, us, dpath, events, meta)
