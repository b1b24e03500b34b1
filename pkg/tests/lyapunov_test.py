import numpy as np
import pytest

from ptime.errors import NotHurwitz, IllConditioned, BoundViolated, DomainError
from ptime.timewarp import evalMu, evalKappa, validateClass, Family
from ptime.lyapunov import *


def randomHurwitz(rng, N):
    A = rng.standard_normal((N, N)) / np.sqrt(N)
    top = np.max(np.linalg.eigvals(A).real)
    return A - (top + rng.uniform(0.5, 1.5)) * np.eye(N)


def test_hand_case():
    sol = solveLyapunov(closedLoopMatrix(-0.1 * np.eye(1), -np.eye(1)))
    assert(np.allclose(sol.X, [[5.55, 5.0], [5.0, 5.5]]))
    assert(sol.residual <= 1e-10)
    assert(np.isclose(sol.envelopeRate, 1 / (2 * sol.xNorm)))
    assert(np.isclose(sol.envelopeCoeff, np.sqrt(2 * sol.xNorm * sol.xInvNorm)))


# Residual and envelope over random Hurwitz matrices
def test_random_hurwitz():
    print("Testing Lyapunov solutions on random Hurwitz matrices")
    rng = np.random.Generator(np.random.Philox(2))
    for _ in range(200):
        Q = randomHurwitz(rng, int(rng.integers(2, 9)))
        sol = solveLyapunov(Q)
        assert(sol.residual <= 1e-10 * max(1.0, sol.xNorm))
        assert(np.all(np.linalg.eigvalsh(sol.X) > 0))
        report = envelopeCheck(Q, sol, horizon=100.0, grid=1001)
        assert(report.maxRatio <= 1 + 1e-8)


def test_errors():
    with pytest.raises(NotHurwitz):
        solveLyapunov(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NotHurwitz):
        solveLyapunov(np.array([[0.1, 0.0], [0.0, -1.0]]))
    with pytest.raises(IllConditioned):
        solveLyapunov(np.diag([-10.0, -2e-12]))


def test_bound_violated():
    Q = closedLoopMatrix(-0.1 * np.eye(1), -np.eye(1))
    sol = solveLyapunov(Q)
    loose = LyapunovSolution(sol.Q, sol.X, sol.xNorm, sol.xInvNorm, 0.5, sol.envelopeRate)
    with pytest.raises(BoundViolated) as err:
        envelopeCheck(Q, loose)
    assert(err.value.t == 0.0)


def test_exponential_mu():
    kmap = exponentialMu(20.0, 10.0, 0.45)
    assert(kmap.family is Family.EXP_INVERSE)
    mu, d1, _d2 = evalMu(kmap, np.array([0.0, 10.0]))
    assert(np.allclose(mu, [0.0, 20 * (1 - np.exp(-0.45))]))
    assert(np.isclose(d1[0], 0.45 * 20 / 10.0))
    with pytest.raises(DomainError):
        exponentialMu(20.0, 10.0, 0.5)
    with pytest.raises(DomainError):
        exponentialMu(20.0, 0.0)


# Q = -I gives X = I/2, so the envelope is sqrt(2) exp(-t) against ||exp(-t I)|| = exp(-t)
def test_negative_identity():
    for N in range(1, 7):
        Q = -np.eye(N)
        sol = solveLyapunov(Q)
        assert(np.allclose(sol.X, 0.5 * np.eye(N), rtol=0, atol=1e-14))
        assert(np.isclose(sol.xNorm, 0.5) and np.isclose(sol.xInvNorm, 2.0))
        assert(np.isclose(sol.envelopeCoeff, np.sqrt(2)) and np.isclose(sol.envelopeRate, 1.0))
        report = envelopeCheck(Q, sol, horizon=20.0, grid=401)
        assert(np.allclose(report.ratios, 1 / np.sqrt(2), rtol=1e-10, atol=0))
        assert(np.isclose(report.maxRatio, 1 / np.sqrt(2)))


# Reaching experiment constants: alpha = 0.4, ||X|| = 10.525, tau = 20
def test_exponential_mu_half_horizon():
    kmap = exponentialMu(20.0, 10.525, 0.4)
    half = 10.525 * np.log(2) / 0.4
    assert(np.isclose(half, 18.24, atol=5e-3))
    assert(np.isclose(evalMu(kmap, half)[0], 10.0, rtol=1e-12))
    assert(np.isclose(evalKappa(kmap, 10.0)[0], half, rtol=1e-12))
    assert(20.0 - evalMu(kmap, 1e3)[0] < 1e-12)


# mu'(0) = rate tau with rate = alpha/||X||, unit slope exactly when ||X|| = alpha tau
def test_exponential_mu_calibration():
    for x_norm, alpha, tau in ((10.525, 0.4, 20.0), (2.0, 0.1, 5.0), (8.0, 0.4, 20.0)):
        kmap = exponentialMu(tau, x_norm, alpha)
        rate = alpha / x_norm
        assert(np.isclose(evalMu(kmap, 0.0)[1], rate * tau))
        assert(np.isclose(evalKappa(kmap, 0.0)[1], 1 / (rate * tau)))
    assert(validateClass(exponentialMu(20.0, 8.0, 0.4), 'K1').passed)
    assert(not validateClass(exponentialMu(20.0, 10.525, 0.4), 'K1').passed)
