from enum import Enum

import numpy as np

from ptime.errors import GainSignError


class LawKind(Enum):
    ITC = 'ITC'
    PTC = 'PTC'
    PTC_SWITCHING = 'PTCSwitching'


def checkNegativeDefinite(A, name='gain'):
    '''
    Check that the symmetric part of A is negative definite

    Args:
        A (ndarray): square gain matrix
        name (str, optional): name used in the error message

    Returns:
        A (ndarray): the matrix as a float array

    Raises:
        GainSignError: if the largest eigenvalue of (A + A^T)/2 is not negative
    '''
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise GainSignError(f'{name} must be square, got shape {A.shape}')
    top = np.linalg.eigvalsh(0.5 * (A + A.T))[-1]
    if not top < 0:
        raise GainSignError(f'{name} must be negative definite, largest eigenvalue {top:g}')
    return A


class ControlLaw():
    """
    Feedback law u = h(qd, q, t) for an Euler-Lagrange model

    Laws are called as law(qd, q, t). Time-varying laws with internal state
    (gain switching) only update that state through latch, which the
    integrator calls once per step; evaluate never mutates the law.

    Attributes:
        kind (LawKind): ITC, PTC or PTCSwitching
        model (EulerLagrangeModel): model the law compensates
        target (ndarray): desired configuration q_d in rad
        P (ndarray): position gain, or None
        D (ndarray): velocity gain, or None
    """
    kind = LawKind.ITC

    def __init__(self, model, target, P=None, D=None):
        self.model = model
        self.target = np.asarray(target, dtype=float)
        self.P = P
        self.D = D

    def evaluate(self, qd, q, t):
        raise NotImplementedError

    def __call__(self, qd, q, t=0.0):
        return self.evaluate(np.asarray(qd, dtype=float), np.asarray(q, dtype=float), t)

    def latch(self, qd, q, t):
        '''Update switching state at a step boundary, returning an event or None'''
        return None

    def reset(self):
        pass

    @property
    def kappa(self):
        return None

    @property
    def metadata(self):
        return {'kind': self.kind.value, 'target': self.target, 'P': self.P, 'D': self.D}

    def toDict(self):
        '''Controller descriptor for scenario files, gains as nested lists'''
        d = {'kind': self.kind.value, 'target': self.target.tolist()}
        if self.P is not None:
            d['P'] = np.asarray(self.P).tolist()
        if self.D is not None:
            d['D'] = np.asarray(self.D).tolist()
        return d
