from .core import EulerLagrangeModel, ConstantInertiaModel, PropertyReport, forwardDynamics, kineticEnergy, massDerivative, massCheck, coriolisLinearityCheck, skewSymmetryCheck
from .twolink import TwoLinkParams, TwoLinkModel, twoLinkModel

__all__ = ['core', 'EulerLagrangeModel', 'ConstantInertiaModel', 'PropertyReport',
           'forwardDynamics', 'kineticEnergy', 'massDerivative',
           'massCheck', 'coriolisLinearityCheck', 'skewSymmetryCheck',
           'twolink', 'TwoLinkParams', 'TwoLinkModel', 'twoLinkModel']
