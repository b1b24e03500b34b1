from .assess import (mappedControl, warpTrajectory, unwarpTrajectory, MappedOutput, mapOutput, EnergyOutput,
                     EquivalenceReport, signMismatches, outputEquivalence, controlMagnitudeBound,
                     MembershipReport, muMembershipCheck, warpMismatch)

__all__ = ['assess', 'mappedControl', 'warpTrajectory', 'unwarpTrajectory', 'MappedOutput', 'mapOutput',
           'EnergyOutput', 'EquivalenceReport', 'signMismatches', 'outputEquivalence',
           'controlMagnitudeBound', 'MembershipReport', 'muMembershipCheck', 'warpMismatch']
