import numpy as np
import pytest

from ptime.errors import SingularMass
from ptime.dynamics import *
from ptime.controllers import ControlLaw
from ptime.sim import integrate


def test_two_link_printed_values():
    model = twoLinkModel()
    assert(np.allclose(model.mass(np.zeros(2)), [[3.16, 0.33], [0.33, 0.33]]))
    assert(np.allclose(model.gravity(np.zeros(2)), [19.62, 4.905]))
    q = np.array([np.pi / 2, 0.0])
    assert(np.allclose(model.mass(q), [[3.16, 1.08], [1.08, 0.58]]))
    assert(np.allclose(model.gravity(q), [0.0, 0.0]))
    C = model.coriolis(np.array([1.0, 2.0]), np.zeros(2))
    assert(np.allclose(C, -1.0 * np.array([[2.0, 3.0], [-1.0, 0.0]])))


def test_two_link_standard_values():
    model = twoLinkModel(form='standard')
    assert(np.allclose(model.mass(np.zeros(2)), [[3.16, 1.08], [1.08, 0.58]]))
    assert(np.allclose(model.coriolis(np.ones(2), np.zeros(2)), 0.0))
    with pytest.raises(ValueError):
        twoLinkModel(form='other')
    with pytest.raises(ValueError):
        TwoLinkParams(m1=-1.0)


def test_two_link_params_generic():
    heavier = twoLinkModel(TwoLinkParams(m2=2.0))
    assert(np.isclose(heavier.p3, 1.0))
    assert(np.isclose(heavier.g1, 2.5))
    assert(heavier.toDict()['m2'] == 2.0)


def test_forward_dynamics():
    model = twoLinkModel()
    q = np.array([0.3, -0.2])
    qd = np.array([0.5, 1.0])
    u = np.array([1.0, -2.0])
    qdd = forwardDynamics(model, q, qd, u)
    assert(np.allclose(model.mass(q) @ qdd + model.coriolis(qd, q) @ qd + model.gravity(q), u))
    d = np.array([0.1, 0.2])
    qdd_d = forwardDynamics(model, q, qd, u, d)
    assert(np.allclose(model.mass(q) @ (qdd_d - qdd), d))


def test_singular_mass():
    model = ConstantInertiaModel(-np.eye(2))
    with pytest.raises(SingularMass):
        forwardDynamics(model, np.zeros(2), np.zeros(2), np.zeros(2))


# Structural properties over 1000 random states
def test_structural_properties():
    print("Testing mass, Coriolis linearity and skew symmetry")
    for form in ('printed', 'standard'):
        model = twoLinkModel(form=form)
        assert(massCheck(model).passed)
        assert(coriolisLinearityCheck(model).passed)
    assert(skewSymmetryCheck(twoLinkModel(form='standard')).passed)
    report = skewSymmetryCheck(twoLinkModel(form='printed'))
    assert(not report.passed and report.worst > 1e-3)


class Unforced(ControlLaw):
    def evaluate(self, qd, q, t):
        return np.zeros(self.model.n)


def test_energy_conservation_standard_form():
    model = twoLinkModel(form='standard')
    law = Unforced(model, np.zeros(2))
    traj = integrate(model, law, (np.array([0.4, -0.3]), np.array([0.5, 0.2])), horizon=10.0, step=1e-3)
    assert(np.isclose(traj.times[-1], 10.0))
    energy = np.array([kineticEnergy(model, traj.q[k], traj.qd[k]) + model.potential(traj.q[k])
                       for k in range(len(traj))])
    assert(np.max(np.abs(energy - energy[0])) <= 1e-6 * (1 + abs(energy[0])))


def test_mass_derivative():
    model = twoLinkModel(form='standard')
    q = np.array([0.2, 0.7])
    qd = np.array([0.0, 1.0])
    Mdot = massDerivative(model, q, qd)
    expected = -np.sin(q[1]) * np.array([[1.0, 0.5], [0.5, 0.0]])
    assert(np.allclose(Mdot, expected, atol=1e-8))


# Control and disturbance torques enter the same way
def test_forward_dynamics_torque_symmetry():
    rng = np.random.Generator(np.random.Philox(4))
    for form in ('printed', 'standard'):
        model = twoLinkModel(form=form)
        for _ in range(100):
            q, qd, a, b = rng.uniform(-2, 2, (4, 2))
            assert(np.array_equal(forwardDynamics(model, q, qd, a, b), forwardDynamics(model, q, qd, b, a)))


class GravityFeedforward(ControlLaw):
    def evaluate(self, qd, q, t):
        return self.model.gravity(q)


def test_gravity_feedforward_holds_rest():
    model = twoLinkModel()
    rest = np.array([0.3, -0.7])
    traj = integrate(model, GravityFeedforward(model, rest), (rest, np.zeros(2)), horizon=10.0, step=1e-2)
    assert(np.max(np.abs(traj.q - rest)) <= 1e-9)
    assert(np.max(np.abs(traj.qd)) <= 1e-9)
