from dataclasses import dataclass, field

import numpy as np
import pandas as pd


def columns(n):
    '''CSV column names t, q1..qn, qd1..qdn, u1..un, d1..dn'''
    return ['t'] + [f'{name}{i + 1}' for name in ('q', 'qd', 'u', 'd') for i in range(n)]


@dataclass
class Trajectory:
    """
    Sampled record of one closed-loop run

    Attributes:
        times (ndarray): (N,) sample times in s, constant step
        q (ndarray): (N, n) positions in rad
        qd (ndarray): (N, n) velocities in rad/s
        u (ndarray): (N, n) control torques
        d (ndarray): (N, n) disturbance torques
        events (list): (kind, t) tuples such as ('GainSwitch', 19.0)
        meta (dict): scenario descriptor and seed
    """
    times: np.ndarray
    q: np.ndarray
    qd: np.ndarray
    u: np.ndarray
    d: np.ndarray
    events: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    @property
    def n(self):
        return self.q.shape[1]

    @property
    def step(self):
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    def event(self, kind):
        '''Time of the first event of the given kind, or None'''
        for k, t in self.events:
            if k == kind:
                return t
        return None

    def errorNorms(self, target):
        '''||q(t) - q_d|| at every sample'''
        return np.linalg.norm(self.q - np.asarray(target), axis=1)

    def stateNorms(self, target=None):
        '''||[q - q_d, qd]|| at every sample'''
        e = self.q if target is None else self.q - np.asarray(target)
        return np.sqrt(np.sum(e ** 2, axis=1) + np.sum(self.qd ** 2, axis=1))

    def sample(self, t):
        '''Linear interpolation of q and qd at the times t'''
        t = np.atleast_1d(t)
        q = np.column_stack([np.interp(t, self.times, self.q[:, i]) for i in range(self.n)])
        qd = np.column_stack([np.interp(t, self.times, self.qd[:, i]) for i in range(self.n)])
        return q, qd

    def truncate(self, count):
        '''First count samples, with events inside the kept span'''
        end = self.times[count - 1]
        return Trajectory(self.times[:count], self.q[:count], self.qd[:count], self.u[:count], self.d[:count],
                          [(k, t) for k, t in self.events if t <= end], dict(self.meta))

    def toFrame(self, domain=None):
        '''pandas DataFrame with the CSV columns and an optional domain column'''
        data = np.column_stack([self.times, self.q, self.qd, self.u, self.d])
        df = pd.DataFrame(data, columns=columns(self.n))
        if domain is not None:
            df['domain'] = domain
        return df

    def toCSV(self, path, domain=None):
        '''
        Write the trajectory as CSV with 17 significant digits

        Events follow the table as comment lines "# kind,t".
        '''
        self.toFrame(domain).to_csv(path, index=False, float_format='%.17g')
        with open(path, 'a') as f:
            for kind, t in self.events:
                f.write(f'# {kind},{t:.17g}\n')

    @classmethod
    def fromCSV(cls, path):
        df = pd.read_csv(path, comment='#')
        events = []
        with open(path) as f:
            for line in f:
                if line.startswith('# '):
                    kind, t = line[2:].strip().split(',')
                    events.append((kind, float(t)))
        n = (len([c for c in df.columns if c != 'domain']) - 1) // 4
        values = df[columns(n)].to_numpy()
        return cls(values[:, 0], values[:, 1:n + 1], values[:, n + 1:2 * n + 1],
                   values[:, 2 * n + 1:3 * n + 1], values[:, 3 * n + 1:], events)
