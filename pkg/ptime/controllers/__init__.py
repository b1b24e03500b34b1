from .core import ControlLaw, LawKind, checkNegativeDefinite
from .itc import jointLimitAccel, JointLimitPotential, PDGravityITC, FeedbackLinearizationITC, pdGravityITC, feedbackLinearizationITC
from .ptc import (PTCLaw, SwitchingPTCLaw, ScheduledPDGravity, ScheduledFeedbackLinearization,
                  ptcSynthesize, ptcSwitching, gainSchedules, feedbackLinearizationSchedules,
                  scheduledPDGravity, scheduledFeedbackLinearization, ptcInitialState, checkMapping)

__all__ = ['core', 'ControlLaw', 'LawKind', 'checkNegativeDefinite',
           'itc', 'jointLimitAccel', 'JointLimitPotential', 'PDGravityITC', 'FeedbackLinearizationITC',
           'pdGravityITC', 'feedbackLinearizationITC',
           'ptc', 'PTCLaw', 'SwitchingPTCLaw', 'ScheduledPDGravity', 'ScheduledFeedbackLinearization',
           'ptcSynthesize', 'ptcSwitching', 'gainSchedules', 'feedbackLinearizationSchedules',
           'scheduledPDGravity', 'scheduledFeedbackLinearization', 'ptcInitialState', 'checkMapping']
