from dataclasses import dataclass, replace

import numpy as np

KINDS = ('none', 'wiener', 'replay')
SCALINGS = ('sqrt_step', 'per_sample')


def generator(seed):
    '''Counter-based random stream, reproducible across platforms'''
    return np.random.Generator(np.random.Philox(seed))


def wienerPath(std, seed, step, horizon, n, scaling='sqrt_step'):
    '''
    Sampled Wiener process d(t_k) with d(t_0) = 0

    Increments are independent normal vectors with standard deviation
    std*sqrt(step) per component, or std per component when scaling is
    'per_sample'.

    Args:
        std (float): intensity of the increments
        seed (int): seed of the random stream
        step (float): sampling step in s
        horizon (float): duration in s
        n (int): number of components
        scaling (str, optional): 'sqrt_step' or 'per_sample'

    Returns:
        path (ndarray): (round(horizon/step) + 1, n) samples

    Examples:
        >>> from ptime.sim import wienerPath
        >>> wienerPath(0.0, 1, 0.1, 1.0, 2).any()
        False
    '''
    if std < 0:
        raise ValueError(f'std must be nonnegative, got {std}')
    if not step > 0:
        raise ValueError(f'step must be positive, got {step}')
    if scaling not in SCALINGS:
        raise ValueError(f'scaling must be one of {SCALINGS}, got {scaling}')
    count = int(round(horizon / step))
    scale = std * (np.sqrt(step) if scaling == 'sqrt_step' else 1.0)
    w = generator(seed).standard_normal((count, n)) * scale
    path = np.zeros((count + 1, n))
    np.cumsum(w, axis=0, out=path[1:])
    return path


@dataclass(frozen=True)
class DisturbanceModel:
    """
    Matched disturbance entering on the torque side

    Attributes:
        kind (str): 'none', 'wiener' or 'replay'
        std (float): Wiener intensity in N m s^-1/2
        seed (int): seed of the Wiener stream
        samples (ndarray): replayed (N, n) samples, held between steps
        scaling (str): Wiener increment convention, 'sqrt_step' or 'per_sample'
    """
    kind: str = 'none'
    std: float = 0.0
    seed: int = 0
    samples: np.ndarray = None
    scaling: str = 'sqrt_step'

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f'disturbance kind must be one of {KINDS}, got {self.kind}')
        if self.kind == 'replay' and self.samples is None:
            raise ValueError('replay disturbance needs samples')

    def withSeed(self, seed):
        return replace(self, seed=int(seed))

    def path(self, step, count, n):
        '''(count, n) samples d(t_0), ..., d(t_{count-1})'''
        if self.kind == 'wiener':
            return wienerPath(self.std, self.seed, step, (count - 1) * step, n, self.scaling)
        if self.kind == 'replay':
            s = np.asarray(self.samples, dtype=float).reshape(-1, n)
            if len(s) >= count:
                return s[:count]
            return np.vstack([s, np.repeat(s[-1:], count - len(s), axis=0)])
        return np.zeros((count, n))

    def toDict(self):
        d = {'kind': self.kind}
        if self.kind == 'wiener':
            d.update({'std': self.std, 'seed': self.seed, 'scaling': self.scaling})
        return d
