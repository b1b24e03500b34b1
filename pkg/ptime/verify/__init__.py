from .assumption import (AssumptionReport, AuxiliaryDecayReport, fitEnvelope, linearizedClosedLoop, slowestRate, defaultHorizon,
                         checkRateCondition, auxiliaryDecayCheck, decaysOnTail)
from .pipeline import DesignLog, settlingCheck, designPipeline

__all__ = ['assumption', 'AssumptionReport', 'AuxiliaryDecayReport', 'fitEnvelope', 'linearizedClosedLoop', 'slowestRate', 'defaultHorizon',
           'checkRateCondition', 'auxiliaryDecayCheck', 'decaysOnTail',
           'pipeline', 'DesignLog', 'settlingCheck', 'designPipeline']
