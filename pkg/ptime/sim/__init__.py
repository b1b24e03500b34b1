from .trajectory import Trajectory, columns
from .disturbance import DisturbanceModel, wienerPath, generator
from .integrate import integrate
from .parallel import sweep

__all__ = ['trajectory', 'Trajectory', 'columns',
           'disturbance', 'DisturbanceModel', 'wienerPath', 'generator',
           'integrate',
           'parallel', 'sweep']
