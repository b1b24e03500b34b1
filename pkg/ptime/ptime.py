# Controller synthesis and simulation shortcuts
from ptime.controllers import ptcSynthesize, ptcSwitching


def synthesize(itc, model, kappa, t0=0.0, switching=True, **kwargs):
    '''
    Prescribed-time controller from an infinite-time controller and a mapping

    Args:
        itc (ControlLaw): infinite-time controller
        model (EulerLagrangeModel): the system
        kappa (KappaMap): class K1(tau) mapping
        t0 (float): start of the prescribed interval in s
        switching (bool): True for bounded gains frozen before the horizon
        kwargs: additional keyword arguments for the switching law

                - epsilon (float): switching margin before t0 + tau
                - sigma (float): error norm that triggers the switch
                - literal_norm (bool): use ||[q, qd]|| instead of the error state

    Returns:
        law (PTCLaw or SwitchingPTCLaw): the prescribed-time controller

    Examples:
        >>> import numpy as np
        >>> from ptime import synthesize
        >>> from ptime.dynamics import twoLinkModel
        >>> from ptime.controllers import pdGravityITC
        >>> from ptime.timewarp import rationalSum
        >>> model = twoLinkModel()
        >>> itc = pdGravityITC(model, -0.1*np.eye(2), -np.eye(2), [np.pi/2, 0])
        >>> law = synthesize(itc, model, rationalSum([(20, 1, 1)], 20), epsilon=1.0)
        >>> law.switchTime
        19.0
    '''
    if switching:
        return ptcSwitching(itc, model, kappa, t0, **kwargs)
    return ptcSynthesize(itc, model, kappa, t0)


def simulate(model, law, x0, seeds=None, **kwargs):
    '''
    Simulate a closed loop once, or once per disturbance seed

    Args:
        model (EulerLagrangeModel): the system
        law (ControlLaw): the feedback law
        x0 (tuple): initial (q, qd)
        seeds (list, optional): disturbance seeds; None for a single run
        kwargs: additional keyword arguments for the integrator

                - t0 (float): initial time
                - horizon (float): simulated duration
                - step (float): integration step
                - disturbance (DisturbanceModel): matched disturbance, per-seed template for sweeps
                - hold (str): 'stage' or 'zoh'
                - processes (int): worker count for sweeps
                - verbose (bool): whether to print progress output

    Returns:
        traj (Trajectory or list): the run, or one run per seed
    '''
    if seeds is None:
        from ptime.sim import integrate
        return integrate(model, law, x0, **kwargs)
    from ptime.sim import sweep
    return sweep(model, law, x0, seeds, **kwargs)
