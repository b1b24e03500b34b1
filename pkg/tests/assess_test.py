from functools import lru_cache

import numpy as np
import pytest

from ptime.errors import NonFinite
from ptime.dynamics import twoLinkModel
from ptime.controllers import pdGravityITC, ptcSynthesize, ptcInitialState, JointLimitPotential
from ptime.timewarp import rationalSum, evalMu
from ptime.sim import Trajectory, integrate
from ptime.assess import *

P = -0.1 * np.eye(2)
D = -np.eye(2)
TARGET = np.array([np.pi / 2, 0.0])
ITC_SPAN = 40.0


def reachKappa():
    return rationalSum([(20, 1, 1)], 20)


def limitTerm():
    return JointLimitPotential(2, {1: (np.radians(-3), np.radians(3))}, np.radians(0.5), 1e-9)


@lru_cache(maxsize=None)
def pairedRuns():
    '''Nominal infinite-time run and the prescribed-time run covering the same warped span'''
    model = twoLinkModel()
    itc = pdGravityITC(model, P, D, TARGET, limitTerm())
    kappa = reachKappa()
    ptc = ptcSynthesize(itc, model, kappa)
    traj_itc = integrate(model, itc, (np.zeros(2), np.zeros(2)), horizon=ITC_SPAN, step=1e-3)
    x0 = ptcInitialState(kappa, np.zeros(2), np.zeros(2))
    traj_ptc = integrate(model, ptc, x0, horizon=evalMu(kappa, ITC_SPAN)[0], step=1e-3)
    return model, itc, ptc, traj_itc, traj_ptc


def test_warp_small_case():
    t = np.array([0.0, 20.0])
    ones = np.ones((2, 1))
    traj = Trajectory(t, ones, ones, ones, ones, [('Marker', 20.0)])
    warped = warpTrajectory(traj, reachKappa())
    assert(np.allclose(warped.times, [0, 10]))
    assert(np.allclose(warped.qd[:, 0], [1, 4]))
    assert(warped.events == [('Marker', 10.0)] and warped.meta['domain'] == 'warped')
    assert(np.all(np.isnan(warped.u)))


# The warped infinite-time run predicts the prescribed-time run
def test_time_warp_equivalence():
    print("Testing time-warp equivalence on a shortened reaching run")
    model, itc, ptc, traj_itc, traj_ptc = pairedRuns()
    warped = warpTrajectory(traj_itc, reachKappa(), model)
    qErr, qdErr = warpMismatch(warped, traj_ptc)
    assert(qErr <= 1e-3 and qdErr <= 1e-2)
    back = unwarpTrajectory(traj_ptc, reachKappa())
    q, _qd = traj_itc.sample(back.times)
    assert(np.max(np.abs(q - back.q)) <= 1e-3)
    assert(back.meta['domain'] == 'itc')


def test_mapped_control_matches_law():
    model, itc, ptc, traj_itc, _traj_ptc = pairedRuns()
    warped = warpTrajectory(traj_itc, reachKappa(), model)
    for k in range(0, len(warped), 997):
        expected = ptc(warped.qd[k], warped.q[k], warped.times[k])
        assert(np.allclose(warped.u[k], expected, rtol=1e-8, atol=1e-8))


def test_mapped_control_identity_random():
    model = twoLinkModel()
    itc = pdGravityITC(model, P, D, TARGET, limitTerm())
    ptc = ptcSynthesize(itc, model, reachKappa())
    rng = np.random.Generator(np.random.Philox(9))
    for s in rng.uniform(0, 200, 100):
        qd = rng.uniform(-1, 1, 2)
        q = rng.uniform(-np.pi, np.pi, 2)
        m, d1, d2 = evalMu(reachKappa(), s)
        l = mappedControl(model, q, qd, itc(qd, q), d1, d2)
        assert(np.allclose(l, ptc(qd / d1, q, m), rtol=1e-8, atol=1e-8))


def test_map_output():
    model = twoLinkModel()
    W = EnergyOutput(model, P, TARGET)
    V = mapOutput(W, reachKappa())
    qd = np.array([0.4, -0.2])
    q = np.array([0.3, 0.01])
    assert(np.isclose(V(qd, q, 0.0), W(qd, q, 0.0)))
    assert(np.isclose(V(qd, q, 10.0), W(qd / 4, q, 20.0)))
    with pytest.raises(NonFinite):
        V(qd, q, 20.0 * (1 - 1e-13))


def test_output_equivalence():
    model, itc, _ptc, traj_itc, traj_ptc = pairedRuns()
    report = outputEquivalence(EnergyOutput(model, P, TARGET), traj_itc, traj_ptc, reachKappa())
    assert(report.equivalent and report.signPreserved and report.passed)
    assert(report.maxMismatch <= report.tolerance)


def test_sign_mismatches():
    assert(signMismatches(np.ones(5), -np.ones(5), window=0) == 5)
    assert(signMismatches(np.ones(5), np.ones(5)) == 0)
    dW = np.array([1.0, 1.0, -1.0, -1.0, -1.0, -1.0])
    assert(signMismatches(np.ones(6), dW, window=1) == 2)
    assert(signMismatches(np.full(3, 1e-14), -np.ones(3), atol=1e-12) == 0)


def test_membership_at_equilibrium():
    model = twoLinkModel()
    itc = pdGravityITC(model, P, D, TARGET)
    traj = integrate(model, itc, (TARGET, np.zeros(2)), horizon=10.0, step=1e-2)
    report = muMembershipCheck(traj, reachKappa(), model)
    assert(report.inMPrime and report.inMDoublePrime and report.certified)
    assert(report.delta == 0.0 and report.tTilde == 0.0 and report.observed == 0.0)


def test_membership_fast_decaying_mu():
    model, _itc, _ptc, traj_itc, _traj_ptc = pairedRuns()
    report = muMembershipCheck(traj_itc, rationalSum([(1e-4, 1, 1)], 20), model)
    assert(not report.inMPrime and not report.certified)
    times, magnitude, Mnorm = controlMagnitudeBound(traj_itc, reachKappa(), model)
    assert(len(times) == len(magnitude) == len(Mnorm) == len(traj_itc))
    assert(np.all(Mnorm > 0))
