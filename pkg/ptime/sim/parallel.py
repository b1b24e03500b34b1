import copy
import multiprocessing as mp
from time import time

from ptime.errors import SimulationDiverged
from ptime.sim.integrate import integrate
from ptime.sim.disturbance import DisturbanceModel


def seedRun(model, law, x0, disturbance, kwargs):
    '''One sweep member; the law arrives as a private copy and starts unlatched'''
    law.reset()
    try:
        return integrate(model, law, x0, disturbance=disturbance, meta={'seed': disturbance.seed}, **kwargs)
    except SimulationDiverged as e:
        return e.trajectory


def sweep(model, law, x0, seeds, disturbance=None, processes=None, verbose=False, **kwargs):
    '''
    Monte-Carlo runs of one closed loop over independent disturbance seeds

    Each run gets its own copy of the law, so switching laws latch per run.
    Runs that diverge return their partial trajectory, which carries a
    'Diverged' event.

    Args:
        model (EulerLagrangeModel): the system
        law (ControlLaw): the feedback law, left untouched
        x0 (tuple): initial (q, qd)
        seeds (list): disturbance seeds, one run each
        disturbance (DisturbanceModel, optional): template whose seed is replaced per run
        processes (int, optional): worker count, 1 runs serially in this process
        verbose (bool, optional): True for timing output
        kwargs: keyword arguments for integrate (t0, horizon, step, hold)

    Returns:
        trajs (list): one Trajectory per seed, in seed order
    '''
    if disturbance is None:
        disturbance = DisturbanceModel('wiener', 0.1)
    tasks = [(model, copy.deepcopy(law), x0, disturbance.withSeed(s), kwargs) for s in seeds]
    if verbose:
        print(f'Starting sweep over {len(tasks)} seeds')
        start_time = time()
    if processes == 1 or len(tasks) <= 1:
        trajs = [seedRun(*task) for task in tasks]
    else:
        with mp.Pool(processes=processes) as p:
            trajs = p.starmap(seedRun, tasks)
    if verbose:
        print('Sweep Time:', time() - start_time)
    return trajs
