from .core import (Family, TERM_WIDTH, KappaMap, AveragedMap, MuMap, ValidationReport, mappingFromDict,
                   evalKappa, evalMu, validateClass, validationGrid)
from .families import rationalSum, logSum, tanSum, combineKappa, averageMu, unitSlopeRational, unitSlopeLog, unitSlopeTan

__all__ = ['core', 'Family', 'TERM_WIDTH', 'KappaMap', 'AveragedMap', 'MuMap', 'ValidationReport', 'mappingFromDict',
           'evalKappa', 'evalMu', 'validateClass', 'validationGrid',
           'families', 'rationalSum', 'logSum', 'tanSum', 'combineKappa', 'averageMu',
           'unitSlopeRational', 'unitSlopeLog', 'unitSlopeTan']
