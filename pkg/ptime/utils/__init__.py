from .plotting import plotTrajectory, plotEnvelope
__all__ = ['plotting', 'plotTrajectory', 'plotEnvelope']
