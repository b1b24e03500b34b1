from dataclasses import dataclass, asdict, fields

import numpy as np

from ptime.dynamics.core import EulerLagrangeModel

FORMS = ('printed', 'standard')


@dataclass(frozen=True)
class TwoLinkParams:
    """
    Physical parameters of a planar two-link arm

    Defaults reproduce the reaching experiment: unit links, centres of mass at
    mid-link, unit masses and 0.33 kg m^2 link inertias.
    """
    l1: float = 1.0
    l2: float = 1.0
    lc1: float = 0.5
    lc2: float = 0.5
    m1: float = 1.0
    m2: float = 1.0
    I1: float = 0.33
    I2: float = 0.33
    g0: float = 9.81

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f'{f.name} must be positive, got {value}')

    def toDict(self):
        return asdict(self)


class TwoLinkModel(EulerLagrangeModel):
    """
    Planar two-link manipulator with revolute joints

    With form='printed' the mass and Coriolis matrices are

        M11 = p1 + p2 cos q2
        M12 = M21 = p3 sin(q1+q2) sin q1 + p4 sin^2(q1+q2) + p5
        M22 = p4 sin^2(q1+q2) + p5
        C = -p2 cos(q1+q2) [[qd2, qd1+qd2], [-qd1, 0]]

    which evaluate to cos q2 + 2.16, 0.5 sin(q1+q2) sin q1 + 0.25 sin^2(q1+q2) + 0.33
    and 0.25 sin^2(q1+q2) + 0.33 for the default parameters. These M and C are
    not related through the Christoffel symbols, so Mdot - 2C is not skew
    symmetric. form='standard' gives the textbook model built from the same
    parameters, which is passive. Both forms share

        g = g0 [(m1 lc1 + m2 l1) cos q1 + m2 lc2 cos(q1+q2), m2 lc2 cos(q1+q2)]

    Args:
        params (TwoLinkParams): physical parameters
        form (str): 'printed' or 'standard'
    """

    def __init__(self, params=None, form='printed'):
        super().__init__(2)
        if form not in FORMS:
            raise ValueError(f'form must be one of {FORMS}, got {form}')
        self.params = TwoLinkParams() if params is None else params
        self.form = form
        p = self.params
        if p == TwoLinkParams():
            self.p1, self.p2, self.p3, self.p4, self.p5 = 2.16, 1.0, 0.5, 0.25, 0.33
            self.g1, self.g2 = 1.5, 0.5
        else:
            self.p1 = p.m1 * p.lc1 ** 2 + p.m2 * (p.l1 ** 2 + p.lc2 ** 2) + p.I1 + p.I2
            self.p2 = 2 * p.m2 * p.l1 * p.lc2
            self.p3 = p.m2 * p.l1 * p.lc2
            self.p4 = p.m2 * p.lc2 ** 2
            self.p5 = p.I2
            self.g1 = p.m1 * p.lc1 + p.m2 * p.l1
            self.g2 = p.m2 * p.lc2

    def mass(self, q):
        q1, q2 = q
        m11 = self.p1 + self.p2 * np.cos(q2)
        if self.form == 'printed':
            s12 = np.sin(q1 + q2)
            m22 = self.p4 * s12 ** 2 + self.p5
            m12 = self.p3 * s12 * np.sin(q1) + m22
        else:
            m22 = self.p4 + self.p5
            m12 = m22 + self.p3 * np.cos(q2)
        return np.array([[m11, m12], [m12, m22]])

    def coriolis(self, qd, q):
        q1, q2 = q
        qd1, qd2 = qd
        if self.form == 'printed':
            h = -self.p2 * np.cos(q1 + q2)
        else:
            h = -self.p3 * np.sin(q2)
        return h * np.array([[qd2, qd1 + qd2], [-qd1, 0.0]])

    def gravity(self, q):
        q1, q2 = q
        c12 = np.cos(q1 + q2)
        return self.params.g0 * np.array([self.g1 * np.cos(q1) + self.g2 * c12, self.g2 * c12])

    def potential(self, q):
        '''Gravitational potential energy, zero with both links horizontal'''
        q1, q2 = q
        return self.params.g0 * (self.g1 * np.sin(q1) + self.g2 * np.sin(q1 + q2))

    def toDict(self):
        return {'form': self.form, **self.params.toDict()}


def twoLinkModel(params=None, form='printed'):
    '''
    Two-link manipulator model

    Args:
        params (TwoLinkParams, optional): physical parameters, defaults to the reaching experiment
        form (str, optional): 'printed' for the experiment equations, 'standard' for the passive textbook model

    Returns:
        model (TwoLinkModel): the manipulator

    Examples:
        >>> import numpy as np
        >>> from ptime.dynamics import twoLinkModel
        >>> model = twoLinkModel()
        >>> model.mass(np.zeros(2))
        array([[3.16, 0.33],
               [0.33, 0.33]])
        >>> model.gravity(np.zeros(2))
        array([19.62 ,  4.905])
    '''
    return TwoLinkModel(params, form)
