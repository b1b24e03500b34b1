import argparse
import logging
import sys

from ptime.__version__ import __version__
from ptime.errors import DomainError, GainSignError, NoCandidatePassed, ScenarioError, SimulationDiverged
from ptime.cli.scenario import VARIANTS, loadScenario
from ptime.cli.commands import runScenario, designScenario, verifySuite, sweepScenario

log = logging.getLogger('ptime')

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_DIVERGED = 3
EXIT_NO_CANDIDATE = 4


def buildParser():
    parser = argparse.ArgumentParser(prog='ptime', description='Prescribed-time controller synthesis and simulation')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('scenario', help='scenario TOML file or bundled scenario name')
    common.add_argument('--step', type=float, help='integration step in s')
    common.add_argument('--horizon', type=float, help='simulated duration in s')
    common.add_argument('--seed', type=int, help='first disturbance seed')
    common.add_argument('--out', help='output root, overrides $PTIME_OUTPUT and the scenario')
    common.add_argument('--processes', type=int, help='worker processes for seed sweeps')
    common.add_argument('-v', '--verbose', action='count', default=0, help='-v for info, -vv for debug output')

    sub = parser.add_subparsers(dest='command', required=True)
    run = sub.add_parser('run', parents=[common], help='simulate one controller variant')
    run.add_argument('--variant', choices=VARIANTS, help='controller variant, the configured kind by default')
    run.add_argument('--disturbed', action='store_true', help='apply the Wiener disturbance')
    run.add_argument('--seeds', type=int, help='number of disturbance seeds')
    sub.add_parser('design', parents=[common], help='run the design pipeline and emit a controller table')
    sub.add_parser('verify', parents=[common], help='run every property check on the scenario')
    sweep = sub.add_parser('sweep', parents=[common], help='compare both variants over disturbance seeds')
    sweep.add_argument('--seeds', type=int, help='number of disturbance seeds')
    return parser


def main(argv=None):
    '''
    Command-line entry point

    Returns:
        code (int): 0 on success, 2 for invalid scenarios or failed checks,
            3 on divergence, 4 if the design pipeline found no mapping
    '''
    args = buildParser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')
    verbose = args.verbose > 0
    try:
        scenario = loadScenario(args.scenario).override(step=args.step, horizon=args.horizon, seed=args.seed,
                                                        seeds=getattr(args, 'seeds', None),
                                                        disturbed=getattr(args, 'disturbed', False))
        if args.command == 'run':
            code, _ = runScenario(scenario, args.variant, args.out, args.processes, verbose)
        elif args.command == 'design':
            code, _ = designScenario(scenario, args.out, verbose)
        elif args.command == 'verify':
            code, _ = verifySuite(scenario, args.out, verbose)
        else:
            code, _ = sweepScenario(scenario, args.out, args.processes, verbose)
    except (ScenarioError, GainSignError, DomainError) as e:
        log.error('invalid scenario: %s', e)
        return EXIT_INVALID
    except SimulationDiverged as e:
        log.error('%s', e)
        return EXIT_DIVERGED
    except NoCandidatePassed as e:
        log.error('%s', e)
        return EXIT_NO_CANDIDATE
    return code


if __name__ == '__main__':
    sys.exit(main())
