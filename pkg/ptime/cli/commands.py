import logging
import os
import warnings

import numpy as np
import pandas as pd
import tomli_w

from ptime.errors import BoundViolated, MappingWarning, NoCandidatePassed, NotStabilizing, SimulationDiverged
from ptime.timewarp import MuMap, evalKappa, validateClass
from ptime.dynamics import massCheck, coriolisLinearityCheck, skewSymmetryCheck
from ptime.controllers import ptcSynthesize, ptcInitialState
from ptime.lyapunov import solveLyapunov, envelopeCheck
from ptime.sim import integrate, sweep
from ptime.verify import checkRateCondition, designPipeline, linearizedClosedLoop
from ptime.assess import warpTrajectory, warpMismatch, EnergyOutput, outputEquivalence, muMembershipCheck
from ptime.utils import plotTrajectory, plotEnvelope

log = logging.getLogger(__name__)

ENV_OUTPUT = 'PTIME_OUTPUT'
ITC_HORIZON_CAP = 200.0


def outputDirectory(scenario, command, out=None):
    '''
    Directory <root>/<scenario name>/<command>, created if missing

    The root is out if given, else $PTIME_OUTPUT, else the scenario's output.directory.
    '''
    root = out or os.environ.get(ENV_OUTPUT) or scenario.output['directory']
    directory = os.path.join(root, scenario.name, command)
    os.makedirs(directory, exist_ok=True)
    return directory


def deadline(scenario):
    '''Evaluation time t0 + tau - epsilon of the scenario'''
    c = scenario.controller
    return c['t0'] + c['kappa']['tau'] - c['epsilon']


def _simulationArgs(scenario):
    s = scenario.simulation
    return {'t0': scenario.controller['t0'], 'horizon': s['horizon'], 'step': s['step'], 'hold': s['hold'],
            'diverge': s['diverge']}


def settlingMetrics(traj, scenario, label, seed=None):
    '''
    Summary row of one run

    Returns:
        row (dict): final error, error at the deadline, 2% settling time,
            switch time, largest |q2| in degrees and divergence flag
    '''
    target = scenario.target
    norms = traj.errorNorms(target)
    t_eval = deadline(scenario)
    if traj.times[0] <= t_eval <= traj.times[-1]:
        q, _qd = traj.sample(t_eval)
        at_deadline = float(np.linalg.norm(q[0] - target))
    else:
        at_deadline = np.nan
    settled = norms <= 0.02 * max(norms[0], 1e-12)
    tail = np.flip(np.logical_and.accumulate(np.flip(settled)))
    idx = np.flatnonzero(tail)
    switch = traj.event('GainSwitch')
    return {'variant': label, 'seed': seed, 'final_error': float(norms[-1]), 'deadline': t_eval,
            'error_at_deadline': at_deadline,
            'settling_time': float(traj.times[idx[0]]) if len(idx) else np.inf,
            'switch_time': np.nan if switch is None else switch,
            'max_abs_q2_deg': float(np.degrees(np.max(np.abs(traj.q[:, 1])))) if traj.n > 1 else np.nan,
            'diverged': traj.event('Diverged') is not None}


def _label(scenario, variant):
    return variant or scenario.variantKind().lower()


def runScenario(scenario, variant=None, out=None, processes=None, verbose=False):
    '''
    Simulate the scenario and write trajectories, plots and a summary

    A nominal or single-seed scenario gives one run with traj_<variant>.csv
    and traj_<variant>.svg. With a Wiener disturbance and several seeds every
    seed gets traj_<variant>_seed<k>.csv and the spread is drawn in
    envelope_<variant>.svg. summary.csv holds one row per run.

    Args:
        scenario (Scenario): validated scenario
        variant (str, optional): 'itc' or 'ptc', the configured controller kind by default
        out (str, optional): output root
        processes (int, optional): workers for seed sweeps
        verbose (bool, optional): True for progress output

    Returns:
        code, summary (int, DataFrame): 0 on success, 3 if a run diverged, and the summary rows

    Raises:
        GainSignError: if the scenario gains are not negative definite
    '''
    directory = outputDirectory(scenario, 'run', out)
    model = scenario.buildModel()
    law = scenario.buildLaw(model, variant)
    x0 = scenario.initialState()
    label = _label(scenario, variant)
    kwargs = _simulationArgs(scenario)
    code = 0
    if scenario.disturbance['kind'] == 'wiener' and scenario.disturbance['seeds'] > 1:
        seeds = scenario.seeds
        trajs = sweep(model, law, x0, seeds, scenario.disturbanceModel(), processes, verbose, **kwargs)
        rows = []
        for seed, traj in zip(seeds, trajs):
            traj.toCSV(os.path.join(directory, f'traj_{label}_seed{seed}.csv'), domain=label)
            rows.append(settlingMetrics(traj, scenario, label, seed))
        plotEnvelope({label: trajs}, os.path.join(directory, f'envelope_{label}.svg'), scenario.target,
                     deadline(scenario), f'{scenario.name}: {label}, {len(seeds)} seeds')
        if any(row['diverged'] for row in rows):
            code = 3
    else:
        seed = scenario.disturbance['seed'] if scenario.disturbance['kind'] == 'wiener' else None
        meta = {'scenario': scenario.name, 'variant': label}
        try:
            traj = integrate(model, law, x0, disturbance=scenario.disturbanceModel(), meta=meta, verbose=verbose,
                             **kwargs)
        except SimulationDiverged as e:
            log.error('%s', e)
            traj = e.trajectory
            code = 3
        if traj.event('Diverged') is not None:
            code = 3
        traj.toCSV(os.path.join(directory, f'traj_{label}.csv'), domain=label)
        plotTrajectory(traj, os.path.join(directory, f'traj_{label}.svg'), scenario.target, f'{scenario.name}: {label}')
        rows = [settlingMetrics(traj, scenario, label, seed)]
    summary = pd.DataFrame(rows)
    summary.to_csv(os.path.join(directory, 'summary.csv'), index=False, float_format='%.17g')
    print(summary.to_string(index=False))
    return code, summary


def designScenario(scenario, out=None, verbose=False):
    '''
    Run the design pipeline on the scenario's infinite-time controller

    Writes design_log.txt, design_log.csv and, on success, controller.toml,
    a [controller] table for the synthesized switching law that can replace
    the scenario's own.

    Returns:
        code, designlog (int, DesignLog): 0 on success, 3 if the nominal loop
            does not settle, 4 if no candidate passed

    Raises:
        GainSignError: if the scenario gains are not negative definite
    '''
    directory = outputDirectory(scenario, 'design', out)
    model = scenario.buildModel()
    itc = scenario.buildITC(model)
    c = scenario.controller
    d = scenario.design
    candidates = [scenario.buildKappa(i) for i in range(len(d['candidates']))]
    hint = linearizedClosedLoop(model, itc) if d['exponential_hint'] else None
    try:
        law, designlog = designPipeline(model, itc, c['kappa']['tau'], candidates, c['epsilon'],
                                        np.radians(c['sigma']), hint, scenario.initialState(), c['t0'],
                                        d['alpha'], d.get('horizon'), d['step'], d['processes'], verbose)
    except NoCandidatePassed as e:
        log.error('%s', e)
        e.log.write(directory)
        return 4, e.log
    except NotStabilizing as e:
        log.error('infinite-time controller does not settle: %s', e)
        return 3, None
    designlog.write(directory)
    with open(os.path.join(directory, 'controller.toml'), 'wb') as f:
        tomli_w.dump(scenario.fragment(law), f)
    print(designlog.toText(), end='')
    return 0, designlog


class _Checks():
    """Rows of the verification report"""

    def __init__(self):
        self.rows = []

    def add(self, check, passed, value=np.nan, tolerance=np.nan, required=True, note=''):
        self.rows.append({'check': check, 'passed': bool(passed), 'value': value, 'tolerance': tolerance,
                          'required': required, 'note': note})
        log.info('%s: %s (%s)', check, 'pass' if passed else 'FAIL', note or value)

    @property
    def failed(self):
        return [r['check'] for r in self.rows if r['required'] and not r['passed']]

    def frame(self):
        return pd.DataFrame(self.rows, columns=['check', 'passed', 'value', 'tolerance', 'required', 'note'])


def verifySuite(scenario, out=None, verbose=False):
    '''
    Run every property check on the scenario and write verify_report.csv and verify_report.txt

    The checks are class K1 validation of the mapping, the mass matrix and
    Coriolis properties of the model, the Lyapunov residual and envelope of
    the linearized closed loop, the convergence-rate assumption, the
    time-warp equivalence of the infinite-time and prescribed-time runs, and
    the output equivalence with the energy-like output. Skew symmetry is
    informational for the printed two-link form and the control magnitude
    membership is always informational. A mapping that is class K but not
    class K1 is recorded with a note and the prescribed-time run starts from
    the scaled initial velocity.

    Returns:
        code, report (int, DataFrame): 0 if every required check passed, 2 otherwise

    Raises:
        GainSignError: if the scenario gains are not negative definite
    '''
    directory = outputDirectory(scenario, 'verify', out)
    checks = _Checks()
    model = scenario.buildModel()
    itc = scenario.buildITC(model)
    kappa = scenario.buildKappa()
    x0 = scenario.initialState()
    step = scenario.simulation['step']

    vreport = validateClass(kappa, 'K1')
    isK = all(vreport.checks[name] for name in ('zero', 'monotone', 'divergent'))
    note = '' if vreport.passed else f'class K only, initial velocity scaled by kappa\'(0)={evalKappa(kappa, 0.0)[1]:.6g}'
    checks.add('mapping class', isK, note=note or 'class K1')

    for report in (massCheck(model), coriolisLinearityCheck(model)):
        checks.add(report.name, report.passed, report.worst, report.tol)
    skew = skewSymmetryCheck(model)
    printed = getattr(model, 'form', None) == 'printed'
    checks.add(skew.name, skew.passed, skew.worst, skew.tol, required=not printed,
               note='printed two-link equations are not passive' if printed and not skew.passed else '')

    A = linearizedClosedLoop(model, itc)
    if A is not None:
        solution = solveLyapunov(A)
        tol = 1e-10 * max(1.0, solution.xNorm)
        checks.add('lyapunov residual', solution.residual <= tol, solution.residual, tol)
        try:
            envelope = envelopeCheck(A, solution)
            checks.add('lyapunov envelope', True, envelope.maxRatio, 1 + 1e-8)
        except BoundViolated as e:
            checks.add('lyapunov envelope', False, e.t, 1 + 1e-8, note=str(e))

    if not isK:
        return _finish(checks, directory)

    assumption = checkRateCondition(model, itc, MuMap(kappa), x0, t0=scenario.controller['t0'], verbose=verbose)
    checks.add('convergence-rate assumption', assumption.satisfied, assumption.tTilde, assumption.horizon / 2,
               note=f'branch {assumption.whichBranch}')

    t0 = scenario.controller['t0']
    ptc_horizon = min(scenario.simulation['horizon'], kappa.tau - scenario.controller['epsilon'])
    itc_horizon = min(float(evalKappa(kappa, ptc_horizon)[0]), ITC_HORIZON_CAP)
    try:
        traj_itc = integrate(model, itc, x0, t0=t0, horizon=itc_horizon, step=step, verbose=verbose)
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', MappingWarning)
            ptc = ptcSynthesize(itc, model, kappa, t0)
        traj_ptc = integrate(model, ptc, ptcInitialState(kappa, *x0), t0=t0, horizon=ptc_horizon, step=step,
                             verbose=verbose)
    except SimulationDiverged as e:
        checks.add('time-warp equivalence', False, note=str(e))
        return _finish(checks, directory)

    warped = warpTrajectory(traj_itc, kappa)
    qErr, qdErr = warpMismatch(warped, traj_ptc)
    checks.add('time-warp position', qErr <= 1e-3, qErr, 1e-3)
    checks.add('time-warp velocity', qdErr <= 1e-2, qdErr, 1e-2)

    if itc.P is not None:
        equivalence = outputEquivalence(EnergyOutput(model, itc.P, itc.target), traj_itc, traj_ptc, kappa)
        checks.add('output equivalence', equivalence.equivalent, equivalence.maxMismatch, equivalence.tolerance)
        checks.add('output derivative sign', equivalence.signPreserved, equivalence.signMismatches, 0)

    membership = muMembershipCheck(traj_itc, kappa, model)
    checks.add('control magnitude membership', membership.certified, membership.delta, 1.0, required=False,
               note=f'observed {membership.observed:.3g}')
    return _finish(checks, directory)


def _finish(checks, directory):
    report = checks.frame()
    report.to_csv(os.path.join(directory, 'verify_report.csv'), index=False, float_format='%.17g')
    text = report.to_string(index=False)
    with open(os.path.join(directory, 'verify_report.txt'), 'w') as f:
        f.write(text + '\n')
    print(text)
    if checks.failed:
        log.error('failed checks: %s', ', '.join(checks.failed))
        return 2, report
    return 0, report


def sweepScenario(scenario, out=None, processes=None, verbose=False):
    '''
    Compare the infinite-time and prescribed-time controllers over disturbance seeds

    Both variants run under the same Wiener seeds. Per-seed rows go to
    sweep_summary.csv, the median and maximum error at the deadline per
    variant to comparison.csv, and both spreads to envelope.svg.

    Returns:
        code, comparison (int, DataFrame): 0 on success, 3 if any run diverged, and the statistics

    Raises:
        GainSignError: if the scenario gains are not negative definite
    '''
    if scenario.disturbance['kind'] == 'none':
        scenario = scenario.override(disturbed=True)
    directory = outputDirectory(scenario, 'sweep', out)
    model = scenario.buildModel()
    x0 = scenario.initialState()
    kwargs = _simulationArgs(scenario)
    seeds = scenario.seeds
    runs = {}
    rows = []
    for variant in ('itc', 'ptc'):
        law = scenario.buildLaw(model, variant)
        trajs = sweep(model, law, x0, seeds, scenario.disturbanceModel(), processes, verbose, **kwargs)
        runs[variant] = trajs
        for seed, traj in zip(seeds, trajs):
            traj.toCSV(os.path.join(directory, f'traj_{variant}_seed{seed}.csv'), domain=variant)
            rows.append(settlingMetrics(traj, scenario, variant, seed))
    summary = pd.DataFrame(rows)
    summary.to_csv(os.path.join(directory, 'sweep_summary.csv'), index=False, float_format='%.17g')
    stats = summary.groupby('variant')['error_at_deadline'].agg(['median', 'max']).reset_index()
    medians = dict(zip(stats['variant'], stats['median']))
    stats['median_ratio_to_itc'] = stats['median'] / medians['itc']
    stats.to_csv(os.path.join(directory, 'comparison.csv'), index=False, float_format='%.17g')
    plotEnvelope(runs, os.path.join(directory, 'envelope.svg'), scenario.target, deadline(scenario),
                 f'{scenario.name}: {len(seeds)} seeds')
    print(stats.to_string(index=False))
    return (3 if summary['diverged'].any() else 0), stats
