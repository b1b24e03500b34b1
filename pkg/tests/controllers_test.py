import numpy as np
import pytest

from ptime.errors import DomainError, GainSignError, MappingWarning
from ptime.dynamics import twoLinkModel
from ptime.timewarp import rationalSum, evalKappa
from ptime.controllers import *

P = -0.1 * np.eye(2)
D = -np.eye(2)
TARGET = np.array([np.pi / 2, 0.0])


def reachKappa():
    return rationalSum([(20, 1, 1)], 20)


def limitTerm():
    return JointLimitPotential(2, {1: (np.radians(-3), np.radians(3))}, np.radians(0.5), 1e-9)


def test_pd_gravity_itc():
    model = twoLinkModel()
    law = pdGravityITC(model, P, D, TARGET)
    assert(np.allclose(law(np.zeros(2), np.zeros(2)), [19.77707963, 4.905]))
    with pytest.raises(GainSignError):
        pdGravityITC(model, -P, D, TARGET)
    with pytest.raises(GainSignError):
        feedbackLinearizationITC(model, P, np.zeros((2, 2)), TARGET)
    assert(law.toDict()['law'] == 'pd_gravity')


def test_joint_limit_term():
    assert(np.isclose(jointLimitAccel(np.radians(2.75)), -3.2e-8, rtol=1e-9, atol=0))
    assert(np.isclose(jointLimitAccel(np.radians(-2.75)), 3.2e-8, rtol=1e-9, atol=0))
    assert(jointLimitAccel(0.0) == 0.0)
    assert(np.isfinite(jointLimitAccel(np.radians(3.5))))
    with pytest.raises(ValueError):
        jointLimitAccel(0.0, lower=0.1, upper=-0.1)
    gamma = limitTerm()(np.array([0.0, np.radians(2.75)]))
    assert(gamma[0] == 0.0 and np.isclose(gamma[1], -3.2e-8))
    d = limitTerm().toDict()
    assert(np.allclose(d['bounds']['2'], [-3, 3]) and np.isclose(d['influence'], 0.5))
    with pytest.raises(ValueError):
        JointLimitPotential(2, {2: (-0.1, 0.1)})


def test_ptc_matches_itc_after_horizon():
    model = twoLinkModel()
    itc = pdGravityITC(model, P, D, TARGET)
    ptc = ptcSynthesize(itc, model, reachKappa())
    rng = np.random.Generator(np.random.Philox(1))
    for _ in range(20):
        qd, q = rng.uniform(-1, 1, 2), rng.uniform(-np.pi, np.pi, 2)
        assert(np.allclose(ptc(qd, q, 20.0), itc(qd, q)))
        # kappa'(0) = 1 and kappa''(0) = 0.1 for the reaching map
        assert(np.allclose(ptc(qd, q, 0.0), itc(qd, q) + 0.1 * model.mass(q) @ qd))


def test_non_unit_slope_warns():
    model = twoLinkModel()
    itc = pdGravityITC(model, P, D, TARGET)
    with pytest.warns(MappingWarning):
        ptcSynthesize(itc, model, rationalSum([(1, 1, 1)], 20))
    q0, qd0 = ptcInitialState(rationalSum([(1, 1, 1)], 20), [0.1, 0.2], [1.0, -1.0])
    assert(np.allclose(q0, [0.1, 0.2]) and np.allclose(qd0, [0.05, -0.05]))


# The synthesized law and the scheduled-gain form agree before the horizon
def test_scheduled_gain_consistency():
    print("Testing synthesized against scheduled gains")
    model = twoLinkModel()
    kappa = reachKappa()
    rng = np.random.Generator(np.random.Philox(5))
    pd = ptcSynthesize(pdGravityITC(model, P, D, TARGET, limitTerm()), model, kappa)
    pd_gains = scheduledPDGravity(model, P, D, TARGET, kappa, limit=limitTerm())
    fl = ptcSynthesize(feedbackLinearizationITC(model, P, D, TARGET), model, kappa)
    fl_gains = scheduledFeedbackLinearization(model, P, D, TARGET, kappa)
    for t in rng.uniform(0, 19, 10000):
        qd = rng.uniform(-2, 2, 2)
        q = np.array([rng.uniform(-np.pi, np.pi), rng.uniform(np.radians(-3.2), np.radians(3.2))])
        assert(np.allclose(pd(qd, q, t), pd_gains(qd, q, t), rtol=1e-10, atol=1e-10))
        assert(np.allclose(fl(qd, q, t), fl_gains(qd, q, t), rtol=1e-10, atol=1e-10))


def test_gain_schedules():
    model = twoLinkModel()
    kappa = reachKappa()
    Pt, Dt = gainSchedules(P, D, model, kappa, 0.0, np.zeros(2))
    assert(np.allclose(Pt, P))
    assert(np.allclose(Dt, [[-0.684, 0.033], [0.033, -0.967]]))
    Pt, Dt = gainSchedules(P, D, model, kappa, 10.0, np.zeros(2))
    assert(np.allclose(Pt, 16 * P))
    assert(np.allclose(Dt, 4 * D + 0.2 * model.mass(np.zeros(2))))
    Pt, Dt = gainSchedules(P, D, model, kappa, 25.0, np.zeros(2))
    assert(np.allclose(Pt, P) and np.allclose(Dt, D))
    Pt, Dt = feedbackLinearizationSchedules(P, D, kappa, 10.0)
    assert(np.allclose(Dt, 4 * D + 0.2 * np.eye(2)))


def test_switching_time_trigger():
    model = twoLinkModel()
    itc = pdGravityITC(model, P, D, TARGET)
    law = ptcSwitching(itc, model, reachKappa(), epsilon=1.0)
    assert(law.switchTime == 19.0)
    x = np.array([0.1, -0.1])
    assert(law.latch(x, x, 10.0) is None)
    frozen = law(x, x, 19.0)
    # evaluate never mutates the law
    assert(np.allclose(law(x, x, 19.5), frozen) and law.ts is None)
    assert(law.latch(x, x, 19.0) == ('GainSwitch', 19.0))
    assert(law.latch(x, x, 19.2) is None)
    assert(np.allclose(law(x, x, 40.0), frozen))
    d1, ratio = law.coefficients(40.0)
    assert(np.isclose(d1, 400.0) and np.isclose(ratio, 2.0))
    law.reset()
    assert(law.ts is None)


def test_switching_error_trigger():
    model = twoLinkModel()
    itc = pdGravityITC(model, P, D, TARGET)
    law = ptcSwitching(itc, model, reachKappa(), epsilon=1.0, sigma=0.05)
    q = TARGET + 0.01
    assert(law.latch(np.zeros(2), np.zeros(2), 0.5) is None)
    assert(law.latch(np.zeros(2), q, 2.5) == ('GainSwitch', 2.5))
    assert(np.allclose(law.coefficients(10.0), (evalKappa(reachKappa(), 2.5)[1], 2 / 17.5)))
    literal = ptcSwitching(itc, model, reachKappa(), sigma=0.05, literal_norm=True)
    assert(literal.latch(np.zeros(2), q, 2.5) is None)


def test_switching_domain():
    model = twoLinkModel()
    itc = pdGravityITC(model, P, D, TARGET)
    with pytest.raises(DomainError):
        ptcSwitching(itc, model, reachKappa(), epsilon=0.0)
    with pytest.raises(DomainError):
        ptcSwitching(itc, model, reachKappa(), epsilon=20.0)
    with pytest.raises(DomainError):
        ptcSwitching(itc, model, reachKappa(), sigma=-1.0)
    d = ptcSwitching(itc, model, reachKappa()).toDict()
    assert(d['kind'] == 'PTCSwitching' and d['kappa']['family'] == 'RationalSum')
