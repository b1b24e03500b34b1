from .scenario import Scenario, loadScenario, bundled
from .commands import runScenario, designScenario, verifySuite, sweepScenario, settlingMetrics, outputDirectory
from .main import main

__all__ = ['scenario', 'Scenario', 'loadScenario', 'bundled',
           'commands', 'runScenario', 'designScenario', 'verifySuite', 'sweepScenario', 'settlingMetrics',
           'outputDirectory', 'main']
