import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ptime.errors import DomainError, NonFinite, ConvergenceError

log = logging.getLogger(__name__)

# Evaluation is refused closer than this to the horizon
CLAMP = 1e-12
# Right end of the bracket used when inverting numerically
BRACKET = 1e-15


class Family(Enum):
    RATIONAL_SUM = 'RationalSum'
    LOG_SUM = 'LogSum'
    TAN_SUM = 'TanSum'
    EXP_INVERSE = 'ExpInverse'
    MU_AVERAGE = 'MuAverage'


TERM_WIDTH = {Family.RATIONAL_SUM: 3, Family.LOG_SUM: 1, Family.TAN_SUM: 2, Family.EXP_INVERSE: 2}


@dataclass(frozen=True)
class KappaMap:
    """
    Class K(tau) time-scaling function

    Each family stores its own coefficient tuples:

        - RationalSum: (a, b, c) for sum a t^b / (tau - t)^c
        - LogSum: (a,) for -sum a ln(1 - t/tau)
        - TanSum: (a, b) for sum a tan^b(pi t / (2 tau))
        - ExpInverse: (alpha, x_norm) for -(x_norm/alpha) ln(1 - t/tau)

    Args:
        family (Family): mapping family
        terms (tuple): tuple of coefficient tuples
        tau (float): horizon of the prescribed interval in seconds
    """
    family: Family
    terms: tuple
    tau: float

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, 'family', family)
        if family is Family.MU_AVERAGE:
            raise DomainError('averaged mappings are built with averageMu')
        terms = tuple(tuple(float(v) for v in np.atleast_1d(term)) for term in self.terms)
        object.__setattr__(self, 'terms', terms)
        object.__setattr__(self, 'tau', float(self.tau))
        if not np.isfinite(self.tau) or self.tau <= 0:
            raise DomainError(f'tau must be positive, got {self.tau}')
        if len(terms) == 0:
            raise DomainError('a mapping needs at least one term')
        for term in terms:
            if len(term) != TERM_WIDTH[family]:
                raise DomainError(f'{family.value} terms take {TERM_WIDTH[family]} coefficients, got {term}')
            if not all(np.isfinite(v) and v > 0 for v in term):
                raise DomainError(f'coefficients must be positive, got {term}')
            if family is Family.EXP_INVERSE and not term[0] < 0.5:
                raise DomainError(f'alpha must lie in (0, 0.5), got {term[0]}')

    @property
    def logWeight(self):
        """Total weight A of the logarithmic families, kappa = -A ln(1 - t/tau)"""
        if self.family is Family.LOG_SUM:
            return sum(a for a, in self.terms)
        if self.family is Family.EXP_INVERSE:
            return sum(x / alpha for alpha, x in self.terms)
        return None

    def toDict(self):
        return {'family': self.family.value, 'terms': [list(term) for term in self.terms], 'tau': self.tau}

    @classmethod
    def fromDict(cls, d):
        return cls(Family(d['family']), tuple(tuple(term) for term in d['terms']), d['tau'])


@dataclass(frozen=True)
class AveragedMap:
    """
    Mapping whose inverse is the mean of the inverses of its parts

    mu(s) = (mu_1(s) + ... + mu_n(s)) / n is again class M(tau), and class
    M1(tau) when every part is. Its mapping kappa = mu^-1 has no closed form
    and is found numerically.

    Args:
        parts (tuple): KappaMap parts sharing one horizon
    """
    parts: tuple
    family: Family = field(init=False, default=Family.MU_AVERAGE)

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, 'parts', parts)
        if len(parts) == 0:
            raise DomainError('an averaged mapping needs at least one part')
        for part in parts:
            if not isinstance(part, KappaMap):
                raise DomainError(f'averaged parts must be KappaMap instances, got {type(part).__name__}')
        taus = {part.tau for part in parts}
        if len(taus) != 1:
            raise DomainError(f'averaged parts must share one horizon, got {sorted(taus)}')

    @property
    def tau(self):
        return self.parts[0].tau

    def toDict(self):
        return {'family': self.family.value, 'maps': [part.toDict() for part in self.parts], 'tau': self.tau}

    @classmethod
    def fromDict(cls, d):
        return cls(tuple(KappaMap.fromDict(part) for part in d['maps']))


def mappingFromDict(d):
    '''KappaMap or AveragedMap from its toDict form'''
    if Family(d['family']) is Family.MU_AVERAGE:
        return AveragedMap.fromDict(d)
    return KappaMap.fromDict(d)


@dataclass(frozen=True)
class MuMap:
    """
    Class M(tau) function, the inverse of a KappaMap

    Args:
        source (KappaMap or AveragedMap): the mapping being inverted
    """
    source: KappaMap
    closedForm: str = field(init=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, 'closedForm', closedFormOf(self.source))

    @property
    def tau(self):
        return self.source.tau


def closedFormOf(kmap):
    '''Name of the analytic inverse available for kmap, or None'''
    if kmap.family is Family.MU_AVERAGE:
        return 'average'
    if kmap.family in (Family.LOG_SUM, Family.EXP_INVERSE):
        return 'log'
    if len(kmap.terms) == 1:
        if kmap.family is Family.RATIONAL_SUM and kmap.terms[0][1:] == (1.0, 1.0):
            return 'rational'
        if kmap.family is Family.TAN_SUM:
            return 'tan'
    return None


def _asMu(mu):
    return mu if isinstance(mu, MuMap) else MuMap(mu)


def _power(t, b):
    '''t^b with its first two derivatives, using the limits at t = 0'''
    with np.errstate(divide='ignore', invalid='ignore'):
        p0 = np.power(t, b)
        p1 = b * np.power(t, b - 1)
        p2 = b * (b - 1) * np.power(t, b - 2)
    zero = t == 0
    if np.any(zero):
        p1 = np.where(zero, 1.0 if b == 1 else (0.0 if b > 1 else np.inf), p1)
        if b == 1 or b > 2:
            p2 = np.where(zero, 0.0, p2)
        elif b == 2:
            p2 = np.where(zero, 2.0, p2)
        else:
            p2 = np.where(zero, np.inf if b > 1 else -np.inf, p2)
    return p0, p1, p2


def _meanMu(amap, s):
    values = [evalMu(part, s) for part in amap.parts]
    return tuple(np.mean([v[i] for v in values], axis=0) for i in range(3))


def _averagedRaw(amap, t, maxiter=200):
    '''
    Kappa of an averaged mapping and its derivatives

    The root of mean(mu_i)(s) = t lies between the smallest and the largest
    of the part mappings kappa_i(t), and is found by bisection there.
    '''
    shape = np.shape(t)
    t = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        bounds = np.array([_raw(part, t)[0] for part in amap.parts])
    usable = np.all(np.isfinite(bounds), axis=0)
    lo = np.where(usable, np.min(bounds, axis=0), 0.0)
    hi = np.where(usable, np.max(bounds, axis=0), 0.0)
    eps = np.finfo(float).eps
    for _ in range(maxiter):
        if np.all(hi - lo <= 4 * eps * hi):
            break
        mid = 0.5 * (lo + hi)
        below = _meanMu(amap, mid)[0] < t
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    s = 0.5 * (lo + hi)
    _m, m1, m2 = _meanMu(amap, s)
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        d1 = 1.0 / m1
        d2 = -m2 / m1 ** 3
    k = np.where(usable, s, np.inf)
    d1 = np.where(usable, d1, np.inf)
    d2 = np.where(usable, d2, np.inf)
    return k.reshape(shape), d1.reshape(shape), d2.reshape(shape)


def _raw(kmap, t):
    '''Unchecked evaluation of kappa and its derivatives on an array of times'''
    if kmap.family is Family.MU_AVERAGE:
        return _averagedRaw(kmap, t)
    tau = kmap.tau
    k = np.zeros_like(t)
    d1 = np.zeros_like(t)
    d2 = np.zeros_like(t)
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        if kmap.family is Family.RATIONAL_SUM:
            r = tau - t
            for a, b, c in kmap.terms:
                u0, u1, u2 = _power(t, b)
                v0 = np.power(r, -c)
                v1 = c * np.power(r, -c - 1)
                v2 = c * (c + 1) * np.power(r, -c - 2)
                k += a * u0 * v0
                d1 += a * (u1 * v0 + u0 * v1)
                d2 += a * (u2 * v0 + 2 * u1 * v1 + u0 * v2)
        elif kmap.family is Family.TAN_SUM:
            w = np.pi / (2 * tau)
            s = np.tan(w * t)
            sec2 = 1 + s ** 2
            for a, b in kmap.terms:
                p0, p1, p2 = _power(s, b)
                k += a * p0
                d1 += a * w * p1 * sec2
                d2 += a * w ** 2 * sec2 * (p2 * sec2 + 2 * s * p1)
        else:
            A = kmap.logWeight
            r = tau - t
            k = -A * np.log1p(-t / tau)
            d1 = A / r
            d2 = A / r ** 2
    return k, d1, d2


def _scalarize(x, *arrays):
    if np.ndim(x) == 0:
        return tuple(float(a) for a in arrays)
    return arrays


def evalKappa(kmap, t):
    '''
    Evaluate a mapping function and its first two derivatives

    Args:
        kmap (KappaMap or AveragedMap): the mapping function
        t (float or ndarray): times in [0, tau)

    Returns:
        kappa, d1, d2 (float or ndarray): kappa(t), kappa'(t) and kappa''(t)

    Raises:
        DomainError: if any t lies outside [0, tau)
        NonFinite: if any t lies within tau*1e-12 of the horizon or the result overflows

    Examples:
        >>> from ptime.timewarp import rationalSum, evalKappa
        >>> kmap = rationalSum([(20, 1, 1)], 20)
        >>> evalKappa(kmap, 10.0)
        (20.0, 4.0, 0.8)
    '''
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0) or np.any(ta >= kmap.tau) or np.any(np.isnan(ta)):
        raise DomainError(f'time outside [0, {kmap.tau})')
    if np.any(ta > kmap.tau * (1 - CLAMP)):
        raise NonFinite(f'time within {CLAMP:g} relative of the horizon {kmap.tau}')
    k, d1, d2 = _raw(kmap, ta)
    if not (np.all(np.isfinite(k)) and np.all(np.isfinite(d1)) and np.all(np.isfinite(d2))):
        raise NonFinite('mapping evaluation overflowed')
    return _scalarize(t, k, d1, d2)


def _closedMu(kmap, form, s):
    tau = kmap.tau
    if form == 'rational':
        a = kmap.terms[0][0]
        mu = tau * s / (a + s)
        d1 = tau * a / (a + s) ** 2
        d2 = -2 * tau * a / (a + s) ** 3
        return mu, d1, d2
    if form == 'log':
        A = kmap.logWeight
        e = np.exp(-s / A)
        return -tau * np.expm1(-s / A), tau / A * e, -tau / A ** 2 * e
    a, b = kmap.terms[0]
    w = np.pi / (2 * tau)
    mu = np.arctan(np.power(s / a, 1 / b)) / w
    return mu, None, None


def _bisect(kmap, s, maxiter):
    lo = np.zeros_like(s)
    hi = np.full_like(s, kmap.tau * (1 - BRACKET))
    khi = _raw(kmap, hi)[0]
    saturated = s >= khi
    tol = 1e-12 * np.maximum(1.0, s)
    done = saturated | (s == 0)
    x = np.where(saturated, hi, 0.0)
    for _ in range(maxiter):
        if np.all(done):
            break
        mid = 0.5 * (lo + hi)
        kmid = _raw(kmap, mid)[0]
        resid = kmid - s
        close = np.abs(resid) <= tol
        narrow = (mid <= lo) | (mid >= hi)
        newly = ~done & (close | narrow)
        x = np.where(newly, mid, x)
        done = done | newly
        hi = np.where(~done & (resid > 0), mid, hi)
        lo = np.where(~done & (resid <= 0), mid, lo)
    if not np.all(done):
        raise ConvergenceError(f'root finding did not converge in {maxiter} iterations')
    # Newton polish inside the final bracket
    active = ~saturated & (s > 0)
    for _ in range(2):
        k, d1, _d2 = _raw(kmap, x)
        with np.errstate(divide='ignore', invalid='ignore'):
            step = np.where(active & (d1 > 0) & np.isfinite(d1), (k - s) / d1, 0.0)
        candidate = np.clip(x - step, lo, hi)
        better = np.abs(_raw(kmap, candidate)[0] - s) < np.abs(k - s)
        x = np.where(active & better, candidate, x)
    return x


def evalMu(mu, s, maxiter=200):
    '''
    Evaluate the inverse mapping and its first two derivatives

    Closed forms are used for single-term rational maps with b = c = 1, the
    logarithmic families and single-term tangent maps; other maps are inverted
    by bisection followed by a Newton polish. Derivatives follow from
    mu' = 1/kappa'(mu) and mu'' = -kappa''(mu)/kappa'(mu)^3. An averaged
    mapping is the mean of its parts' inverses, derivatives included.

    Args:
        mu (MuMap, KappaMap or AveragedMap): the inverse mapping, or the mapping to invert
        s (float or ndarray): nonnegative arguments
        maxiter (int, optional): bisection iteration cap

    Returns:
        mu, d1, d2 (float or ndarray): mu(s), mu'(s) and mu''(s)

    Raises:
        DomainError: if any s is negative
        ConvergenceError: if bisection exceeds maxiter

    Examples:
        >>> from ptime.timewarp import rationalSum, evalMu
        >>> evalMu(rationalSum([(20, 1, 1)], 20), 20.0)
        (10.0, 0.25, -0.0125)
    '''
    mu = _asMu(mu)
    kmap = mu.source
    sa = np.asarray(s, dtype=float)
    if np.any(sa < 0) or np.any(np.isnan(sa)):
        raise DomainError('mu is defined for s >= 0')
    sa = np.atleast_1d(sa)
    d1 = d2 = None
    if mu.closedForm == 'average':
        x, d1, d2 = _meanMu(kmap, sa)
    elif mu.closedForm is not None:
        with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
            x, d1, d2 = _closedMu(kmap, mu.closedForm, sa)
        x = np.where(np.isinf(sa), kmap.tau, x)
    else:
        x = _bisect(kmap, sa, maxiter)
    if d1 is None:
        _k, k1, k2 = _raw(kmap, x)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            d1 = 1.0 / k1
            d2 = -k2 / k1 ** 3
        flat = ~np.isfinite(k1)
        d1 = np.where(flat, 0.0, d1)
        d2 = np.where(flat, 0.0, d2)
    else:
        d1 = np.where(np.isinf(sa), 0.0, d1)
        d2 = np.where(np.isinf(sa), 0.0, d2)
    if np.ndim(s) == 0:
        return float(x[0]), float(d1[0]), float(d2[0])
    return x, d1, d2


@dataclass
class ValidationReport:
    """
    Outcome of a mapping class check

    Attributes:
        target (str): 'K' or 'K1'
        checks (dict): condition name to pass flag
        failures (dict): condition name to the failing t values
    """
    target: str
    checks: dict
    failures: dict

    @property
    def passed(self):
        return all(self.checks.values())

    def __bool__(self):
        return self.passed


def validationGrid(tau, grid=10000, decades=9):
    '''Uniform grid over [0, tau(1-1e-6)] merged with log-spaced tail points tau(1 - 10^-k)'''
    body = np.linspace(0, tau * (1 - 1e-6), grid)
    tail = tau * (1 - np.logspace(-1, -decades, 4 * decades))
    return np.unique(np.concatenate([body, tail]))


def validateClass(kmap, target='K1', grid=10000, slope_tol=1e-9, convex_tol=1e-12):
    '''
    Check a mapping against class K(tau) or K1(tau) on finite grids

    The checks are zero at the origin, strict monotonicity, a divergence proxy
    and, for K1, unit initial slope and a nonnegative second derivative. The
    divergence proxy passes when kappa(tau(1-1e-9)) exceeds 1e6 or the growth
    per decade on the tail tau(1-10^-k) is positive and nondecreasing, which
    covers the slowly diverging logarithmic families.

    Args:
        kmap (KappaMap): the mapping to check
        target (str, optional): 'K' or 'K1'
        grid (int, optional): number of uniform grid points
        slope_tol (float, optional): tolerance on |kappa'(0) - 1|
        convex_tol (float, optional): tolerance on kappa'' >= 0

    Returns:
        report (ValidationReport): per condition flags and failing times

    Examples:
        >>> from ptime.timewarp import rationalSum, validateClass
        >>> validateClass(rationalSum([(20, 1, 1)], 20), 'K1').passed
        True
        >>> validateClass(rationalSum([(1, 1, 1)], 20), 'K1').checks['unitSlope']
        False
    '''
    if target not in ('K', 'K1'):
        raise DomainError(f"class target must be 'K' or 'K1', got {target}")
    tau = kmap.tau
    t = validationGrid(tau, grid)
    k, d1, d2 = _raw(kmap, t)
    checks = {}
    failures = {}

    checks['zero'] = bool(k[0] == 0)
    failures['zero'] = np.array([0.0]) if not checks['zero'] else np.array([])

    steps = np.diff(k)
    bad = ~(steps > 0)
    checks['monotone'] = not np.any(bad)
    failures['monotone'] = t[1:][bad]

    edge = _raw(kmap, np.array([tau * (1 - 1e-9)]))[0][0]
    decades = _raw(kmap, tau * (1 - 10.0 ** -np.arange(1, 10)))[0]
    growth = np.diff(decades)
    steady = np.all(growth > 0) and np.all(growth[1:] >= growth[:-1] * (1 - 1e-6))
    checks['divergent'] = bool(edge > 1e6 or steady)
    failures['divergent'] = np.array([]) if checks['divergent'] else np.array([tau * (1 - 1e-9)])

    if target == 'K1':
        checks['unitSlope'] = bool(abs(d1[0] - 1) <= slope_tol)
        failures['unitSlope'] = np.array([]) if checks['unitSlope'] else np.array([0.0])
        concave = ~(d2 >= -convex_tol)
        checks['convex'] = not np.any(concave)
        failures['convex'] = t[concave]

    report = ValidationReport(target, checks, failures)
    if not report.passed:
        log.info('mapping %s failed class %s checks: %s', kmap.family.value, target,
                 [name for name, ok in checks.items() if not ok])
    return report
