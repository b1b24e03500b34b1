import numpy as np

from ptime.errors import DomainError
from ptime.timewarp.core import KappaMap, AveragedMap, Family


def rationalSum(terms, tau):
    '''
    Sum of rational terms kappa(t) = sum a_i t^b_i / (tau - t)^c_i

    Args:
        terms (list): list of (a, b, c) tuples with positive entries
        tau (float): horizon in seconds

    Returns:
        kmap (KappaMap): the mapping

    Examples:
        >>> from ptime.timewarp import rationalSum
        >>> kmap = rationalSum([(20, 1, 1)], 20)
        >>> kmap.terms
        ((20.0, 1.0, 1.0),)
    '''
    return KappaMap(Family.RATIONAL_SUM, tuple(tuple(term) for term in terms), tau)


def logSum(a, tau):
    '''
    Logarithmic mapping kappa(t) = -sum a_i ln(1 - t/tau)

    Args:
        a (list): positive weights
        tau (float): horizon in seconds

    Returns:
        kmap (KappaMap): the mapping
    '''
    return KappaMap(Family.LOG_SUM, tuple((ai,) for ai in np.atleast_1d(a)), tau)


def tanSum(terms, tau):
    '''
    Tangent mapping kappa(t) = sum a_i tan^b_i(pi t / (2 tau))

    Args:
        terms (list): list of (a, b) tuples with positive entries
        tau (float): horizon in seconds

    Returns:
        kmap (KappaMap): the mapping
    '''
    return KappaMap(Family.TAN_SUM, tuple(tuple(term) for term in terms), tau)


def unitSlopeRational(tau, b=1.0, c=1.0):
    '''Single rational term scaled so that kappa'(0) = 1 (requires b = 1)'''
    if b != 1:
        raise DomainError('a unit initial slope needs b = 1')
    return rationalSum([(tau ** c, b, c)], tau)


def unitSlopeLog(tau):
    '''Logarithmic mapping with kappa'(0) = 1'''
    return logSum([tau], tau)


def unitSlopeTan(tau):
    '''Tangent mapping with kappa'(0) = 1'''
    return tanSum([(2 * tau / np.pi, 1.0)], tau)


def combineKappa(first, second):
    '''
    Sum of two mappings of the same family and horizon

    The pointwise sum of class K(tau) functions is again class K(tau), so the
    result concatenates the coefficient terms.

    Args:
        first (KappaMap): first mapping
        second (KappaMap): second mapping

    Returns:
        kmap (KappaMap): the mapping first + second

    Raises:
        DomainError: if the families or horizons differ
    '''
    if first.family is not second.family:
        raise DomainError(f'cannot combine {first.family.value} with {second.family.value}')
    if first.tau != second.tau:
        raise DomainError(f'horizons differ: {first.tau} and {second.tau}')
    return KappaMap(first.family, first.terms + second.terms, first.tau)


def averageMu(maps):
    '''
    Mapping whose inverse is the mean of the inverses of maps

    Averaging class M(tau) functions stays in class M(tau), and a mean of
    unit-slope maps keeps the unit slope.

    Args:
        maps (list): KappaMap mappings with a common horizon

    Returns:
        amap (AveragedMap): the mapping with mu = mean(mu_i)

    Raises:
        DomainError: if maps is empty or the horizons differ

    Examples:
        >>> from ptime.timewarp import averageMu, unitSlopeRational, unitSlopeLog, evalMu
        >>> amap = averageMu([unitSlopeRational(20), unitSlopeLog(20)])
        >>> evalMu(amap, 0.0)[1]
        1.0
    '''
    return AveragedMap(tuple(maps))
