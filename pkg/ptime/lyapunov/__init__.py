from .lyapunov import LyapunovSolution, EnvelopeReport, closedLoopMatrix, lyapunovOperator, solveLyapunov, exponentialMu, envelopeCheck

__all__ = ['lyapunov', 'LyapunovSolution', 'EnvelopeReport', 'closedLoopMatrix', 'lyapunovOperator',
           'solveLyapunov', 'exponentialMu', 'envelopeCheck']
