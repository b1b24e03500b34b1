import importlib
import inspect

import numpy as np

from ptime import synthesize, simulate
from ptime.dynamics import twoLinkModel
from ptime.controllers import pdGravityITC, PTCLaw, SwitchingPTCLaw
from ptime.timewarp import rationalSum
from ptime.sim import Trajectory, DisturbanceModel

TARGET = np.array([np.pi / 2, 0.0])


def reachLoop():
    model = twoLinkModel()
    itc = pdGravityITC(model, -0.1 * np.eye(2), -np.eye(2), TARGET)
    return model, itc, rationalSum([(20, 1, 1)], 20)


def test_synthesize():
    model, itc, kappa = reachLoop()
    law = synthesize(itc, model, kappa, epsilon=2.0)
    assert(isinstance(law, SwitchingPTCLaw) and law.switchTime == 18.0)
    plain = synthesize(itc, model, kappa, switching=False)
    assert(isinstance(plain, PTCLaw) and not isinstance(plain, SwitchingPTCLaw))


def test_simulate_single_and_seeds():
    print("Testing the simulation shortcut")
    model, itc, _kappa = reachLoop()
    x0 = (np.zeros(2), np.zeros(2))
    traj = simulate(model, itc, x0, horizon=1.0, step=1e-2)
    assert(isinstance(traj, Trajectory) and np.isclose(traj.times[-1], 1.0))
    runs = simulate(model, itc, x0, seeds=[3, 4], horizon=1.0, step=1e-2, processes=1,
                    disturbance=DisturbanceModel('wiener', 0.1))
    assert(len(runs) == 2)
    assert([run.meta['seed'] for run in runs] == [3, 4])
    assert(not np.allclose(runs[0].q, runs[1].q))


PACKAGES = ('ptime', 'ptime.timewarp', 'ptime.dynamics', 'ptime.controllers', 'ptime.lyapunov',
            'ptime.sim', 'ptime.verify')


# Exported docstrings open with their summary line
def test_docstring_summaries():
    for name in PACKAGES:
        module = importlib.import_module(name)
        for attr in module.__all__:
            obj = getattr(module, attr)
            if not (inspect.isfunction(obj) or inspect.isclass(obj)) or not obj.__doc__:
                continue
            lines = obj.__doc__.split('\n')
            summary = lines[1] if not lines[0].strip() and len(lines) > 1 else lines[0]
            assert(summary.strip()), f'{name}.{attr}'
    assert(synthesize.__doc__.split('\n')[1].strip().startswith('Prescribed-time controller'))
