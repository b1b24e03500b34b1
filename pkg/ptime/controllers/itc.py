import numpy as np

from ptime.controllers.core import ControlLaw, LawKind, checkNegativeDefinite


def jointLimitAccel(q2, lower=np.radians(-3.0), upper=np.radians(3.0), influence=np.radians(0.5), gain=1e-9):
    '''
    Repulsive potential-field term keeping a joint inside [lower, upper]

    The field is evaluated in degrees: with x the joint angle and rho the
    influence distance, the term is (1/(x - lower) - 1/rho) gain/(x - lower)^2
    within rho of the lower bound, (1/(upper - x) - 1/rho)(-gain)/(upper - x)^2
    within rho of the upper bound and zero in between. Distances are clamped
    at 1e-6 deg so angles past a bound still get a finite repulsion.

    Args:
        q2 (float): joint angle in rad
        lower (float, optional): lower bound in rad
        upper (float, optional): upper bound in rad
        influence (float, optional): influence distance in rad
        gain (float, optional): field gain

    Returns:
        gamma (float): the repulsive term

    Examples:
        >>> import numpy as np
        >>> from ptime.controllers import jointLimitAccel
        >>> jointLimitAccel(np.radians(2.75))
        -3.2e-08
    '''
    if not lower < upper:
        raise ValueError(f'lower bound {lower} must be below upper bound {upper}')
    if not influence > 0:
        raise ValueError(f'influence must be positive, got {influence}')
    x, lo, hi, rho = np.degrees([q2, lower, upper, influence])
    if x < lo + rho:
        dist = max(x - lo, 1e-6)
        return float((1 / dist - 1 / rho) * gain / dist ** 2)
    if x > hi - rho:
        dist = max(hi - x, 1e-6)
        return float((1 / dist - 1 / rho) * -gain / dist ** 2)
    return 0.0


class JointLimitPotential():
    """
    Vector of joint-limit terms, one entry per joint, zero for unlimited joints

    Args:
        n (int): degrees of freedom
        limits (dict): joint index -> (lower, upper) in rad
        influence (float, optional): influence distance in rad
        gain (float, optional): field gain
    """

    def __init__(self, n, limits, influence=np.radians(0.5), gain=1e-9):
        self.n = n
        self.limits = {int(j): (float(lo), float(hi)) for j, (lo, hi) in limits.items()}
        self.influence = influence
        self.gain = gain
        for j, (lo, hi) in self.limits.items():
            if not 0 <= j < n:
                raise ValueError(f'joint index {j} out of range for n={n}')
            if not lo < hi:
                raise ValueError(f'joint {j}: lower bound must be below upper bound')

    def __call__(self, q):
        gamma = np.zeros(self.n)
        for j, (lo, hi) in self.limits.items():
            gamma[j] = jointLimitAccel(q[j], lo, hi, self.influence, self.gain)
        return gamma

    def toDict(self):
        return {'bounds': {str(j + 1): [float(v) for v in np.degrees(b)] for j, b in self.limits.items()},
                'influence': float(np.degrees(self.influence)), 'gain': self.gain}


class PDGravityITC(ControlLaw):
    """PD control with gravity compensation, u = P q_e + D qd + g(q) + gamma(q)"""
    kind = LawKind.ITC

    def __init__(self, model, P, D, target, limit=None):
        super().__init__(model, target, checkNegativeDefinite(P, 'P'), checkNegativeDefinite(D, 'D'))
        self.limit = limit

    def evaluate(self, qd, q, t=0.0):
        u = self.P @ (q - self.target) + self.D @ qd + self.model.gravity(q)
        if self.limit is not None:
            u = u + self.limit(q)
        return u

    def toDict(self):
        d = super().toDict()
        d['law'] = 'pd_gravity'
        if self.limit is not None:
            d['joint_limits'] = self.limit.toDict()
        return d


class FeedbackLinearizationITC(ControlLaw):
    """Computed torque u = C(qd, q) qd + g(q) + M(q)(P q_e + D qd)"""
    kind = LawKind.ITC

    def __init__(self, model, P, D, target):
        super().__init__(model, target, checkNegativeDefinite(P, 'P'), checkNegativeDefinite(D, 'D'))

    def evaluate(self, qd, q, t=0.0):
        model = self.model
        return model.coriolis(qd, q) @ qd + model.gravity(q) + model.mass(q) @ (self.P @ (q - self.target) + self.D @ qd)

    def toDict(self):
        d = super().toDict()
        d['law'] = 'feedback_linearization'
        return d


def pdGravityITC(model, P, D, target, limit=None):
    '''
    PD controller with gravity compensation

    Args:
        model (EulerLagrangeModel): the system
        P (ndarray): negative definite position gain
        D (ndarray): negative definite velocity gain
        target (ndarray): desired configuration in rad
        limit (function, optional): q -> joint-limit term, for example a JointLimitPotential

    Returns:
        law (PDGravityITC): the infinite-time controller

    Raises:
        GainSignError: if P or D is not negative definite

    Examples:
        >>> import numpy as np
        >>> from ptime.dynamics import twoLinkModel
        >>> from ptime.controllers import pdGravityITC
        >>> law = pdGravityITC(twoLinkModel(), -0.1*np.eye(2), -np.eye(2), [np.pi/2, 0])
        >>> law(np.zeros(2), np.zeros(2))
        array([19.77707963,  4.905     ])
    '''
    return PDGravityITC(model, P, D, target, limit)


def feedbackLinearizationITC(model, P, D, target):
    '''
    Feedback linearizing controller, closed loop qdd = P q_e + D qd

    Args:
        model (EulerLagrangeModel): the system
        P (ndarray): negative definite position gain
        D (ndarray): negative definite velocity gain
        target (ndarray): desired configuration in rad

    Returns:
        law (FeedbackLinearizationITC): the infinite-time controller

    Raises:
        GainSignError: if P or D is not negative definite
    '''
    return FeedbackLinearizationITC(model, P, D, target)
