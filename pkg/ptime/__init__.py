from .__version__ import __version__
from .ptime import synthesize, simulate

__all__ = ['ptime', 'synthesize', 'simulate', '__version__']
