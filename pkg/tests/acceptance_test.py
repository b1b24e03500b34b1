'''
End-to-end checks on the bundled reaching scenario

The closed-loop runs are expensive, so they are built once per session by
the cached helpers below and shared between tests.
'''
from functools import lru_cache

import numpy as np

from ptime.controllers import ptcSynthesize, ptcInitialState
from ptime.sim import integrate, sweep
from ptime.timewarp import MuMap
from ptime.verify import checkRateCondition, designPipeline
from ptime.assess import warpTrajectory, warpMismatch, EnergyOutput, outputEquivalence
from ptime.cli import loadScenario

ITC_SPAN = 200.0
DEADLINE = 19.0
Q2_LIMIT = np.radians(3.0)


@lru_cache(maxsize=None)
def reach():
    scenario = loadScenario('two_link_reach')
    model = scenario.buildModel()
    return scenario, model, scenario.buildITC(model), scenario.buildKappa()


@lru_cache(maxsize=None)
def nominalITC():
    scenario, model, itc, _kappa = reach()
    return integrate(model, itc, scenario.initialState(), horizon=ITC_SPAN, step=1e-3)


@lru_cache(maxsize=None)
def nominalPTC():
    '''Prescribed-time run without switching, up to the switching time'''
    scenario, model, itc, kappa = reach()
    law = ptcSynthesize(itc, model, kappa)
    return integrate(model, law, ptcInitialState(kappa, *scenario.initialState()), horizon=DEADLINE, step=1e-3)


@lru_cache(maxsize=None)
def switchingPTC():
    scenario, model, _itc, _kappa = reach()
    law = scenario.buildLaw(model, 'ptc')
    return integrate(model, law, scenario.initialState(), horizon=scenario.simulation['horizon'], step=1e-3)


@lru_cache(maxsize=None)
def disturbedRuns(variant):
    scenario, model, _itc, _kappa = reach()
    scenario = scenario.override(disturbed=True)
    law = scenario.buildLaw(model, variant)
    return sweep(model, law, scenario.initialState(), scenario.seeds, scenario.disturbanceModel(),
                 horizon=scenario.simulation['horizon'], step=1e-3)


def errorAt(traj, t):
    q, _qd = traj.sample(t)
    return float(np.linalg.norm(q[0] - reach()[0].target))


# Warped infinite-time run against the prescribed-time run
def test_time_warp_equivalence():
    print("Testing time-warp equivalence on the reaching scenario")
    _scenario, _model, _itc, kappa = reach()
    warped = warpTrajectory(nominalITC(), kappa)
    qErr, qdErr = warpMismatch(warped, nominalPTC())
    print(f'position mismatch {qErr:.3g} rad, velocity mismatch {qdErr:.3g} rad/s')
    assert(qErr <= 1e-3)
    assert(qdErr <= 1e-2)


def test_nominal_prescribed_time_convergence():
    traj = switchingPTC()
    assert(traj.event('GainSwitch') == DEADLINE and traj.event('Diverged') is None)
    ptc_error = errorAt(traj, DEADLINE)
    itc_error = errorAt(nominalITC(), DEADLINE)
    print(f'error at {DEADLINE} s: ptc {ptc_error:.3g}, itc {itc_error:.3g}')
    assert(ptc_error <= 1e-2)
    assert(itc_error >= 5 * ptc_error)


def test_disturbance_rejection():
    print("Testing disturbance rejection over 20 seeds")
    ptc = [errorAt(traj, DEADLINE) for traj in disturbedRuns('ptc')]
    itc = [errorAt(traj, DEADLINE) for traj in disturbedRuns('itc')]
    assert(len(ptc) == len(itc) == 20)
    assert(np.median(ptc) <= 0.1 * np.median(itc))
    assert(max(ptc) <= 5e-2)


def test_joint_limit_respected():
    for traj in [switchingPTC()] + disturbedRuns('ptc') + disturbedRuns('itc'):
        assert(traj.event('Diverged') is None)
        assert(np.max(np.abs(traj.q[:, 1])) <= Q2_LIMIT)


def test_output_equivalence():
    _scenario, model, itc, kappa = reach()
    report = outputEquivalence(EnergyOutput(model, itc.P, itc.target), nominalITC(), nominalPTC(), kappa)
    assert(report.maxMismatch <= 5e-3 * (1 + np.max(np.abs(report.W))))
    assert(report.signPreserved)


def test_design_pipeline_controller():
    print("Testing the designed controller on the reaching task")
    scenario, model, itc, kappa = reach()
    candidates = [scenario.buildKappa(i) for i in range(len(scenario.design['candidates']))]
    law, designlog = designPipeline(model, itc, kappa.tau, candidates, scenario.controller['epsilon'],
                                    x0=scenario.initialState(), step=scenario.design['step'])
    assert(designlog.chosen == kappa)
    traj = integrate(model, law, scenario.initialState(), horizon=20.0, step=1e-3)
    assert(errorAt(traj, DEADLINE) <= 1e-2)
    assert(np.max(np.abs(traj.q[:, 1])) <= Q2_LIMIT)
    report = checkRateCondition(model, itc, MuMap(designlog.chosen), scenario.initialState())
    assert(report.satisfied)
