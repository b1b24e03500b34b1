import logging
import multiprocessing as mp
import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ptime.errors import NoCandidatePassed, NotStabilizing
from ptime.sim import integrate
from ptime.timewarp import Family, MuMap, evalKappa
from ptime.lyapunov import solveLyapunov, exponentialMu
from ptime.controllers import ptcSwitching
from ptime.verify.assumption import checkRateCondition, defaultHorizon

log = logging.getLogger(__name__)


def termsText(kmap):
    '''Compact coefficient listing, parts of averaged mappings separated by |'''
    if kmap.family is Family.MU_AVERAGE:
        return ' | '.join(f'{part.family.value}: {termsText(part)}' for part in kmap.parts)
    return ';'.join(' '.join(f'{v:g}' for v in term) for term in kmap.terms)


@dataclass
class DesignLog:
    """
    Record of one design pipeline run

    Attributes:
        path (str): 'exponential' when the Lyapunov shortcut built the mapping, 'candidates' otherwise
        settlingError (float): final error-state norm of the nominal infinite-time run
        candidates (list): (KappaMap, AssumptionReport) for every checked mapping
        chosen (KappaMap): the mapping used for synthesis, None if none passed
        lyapunov (LyapunovSolution): solution of the shortcut path
        notes (list): free-form messages in order
    """
    path: str
    settlingError: float
    candidates: list = field(default_factory=list)
    chosen: object = None
    lyapunov: object = None
    notes: list = field(default_factory=list)

    def records(self):
        '''One row per checked mapping'''
        rows = []
        for i, (kmap, report) in enumerate(self.candidates):
            row = {'index': i, 'family': kmap.family.value, 'tau': kmap.tau,
                   'terms': termsText(kmap),
                   'chosen': kmap == self.chosen}
            row.update(report.summary())
            rows.append(row)
        return pd.DataFrame(rows)

    def toText(self):
        lines = [f'design path: {self.path}', f'nominal settling error: {self.settlingError:.6g}']
        if self.lyapunov is not None:
            lines.append(f'Lyapunov ||X|| = {self.lyapunov.xNorm:.12g}, residual {self.lyapunov.residual:.3g}')
        for i, (kmap, report) in enumerate(self.candidates):
            verdict = 'accepted' if report.satisfied else 'rejected'
            lines.append(f'candidate {i}: {kmap.family.value} terms={termsText(kmap)} tau={kmap.tau:g} '
                         f'{verdict} t_tilde={report.tTilde:g} branch={report.whichBranch}')
        lines.extend(self.notes)
        if self.chosen is not None:
            lines.append(f'chosen mapping: {self.chosen.toDict()}')
        return '\n'.join(lines) + '\n'

    def write(self, directory):
        '''Write design_log.txt and design_log.csv into directory'''
        os.makedirs(directory, exist_ok=True)
        with open(os.path.join(directory, 'design_log.txt'), 'w') as f:
            f.write(self.toText())
        self.records().to_csv(os.path.join(directory, 'design_log.csv'), index=False, float_format='%.17g')


def settlingCheck(model, itc, x0, t0=0.0, horizon=None, step=1e-2, rtol=1e-2, verbose=False):
    '''
    Simulate the nominal infinite-time loop and require the error state to shrink

    Returns:
        traj, error (Trajectory, float): the run and its final error-state norm

    Raises:
        NotStabilizing: if the final error norm exceeds rtol times max(1, initial error norm)
    '''
    if horizon is None:
        horizon = max(200.0, defaultHorizon(model, itc))
    traj = integrate(model, itc, x0, t0=t0, horizon=horizon, step=step, verbose=verbose)
    norms = traj.stateNorms(itc.target)
    if not norms[-1] <= rtol * max(1.0, norms[0]):
        raise NotStabilizing(f'error norm {norms[-1]:.3g} after {horizon:g} s (initial {norms[0]:.3g})')
    return traj, float(norms[-1])


def designPipeline(model, itc, tau, mu_candidates=(), epsilon=1.0, sigma=0.0, exponential_hint=None,
                   x0=None, t0=0.0, alpha=0.45, horizon=None, step=1e-2, processes=1, verbose=False):
    '''
    Build a switching prescribed-time controller from an infinite-time controller

    Steps: check that the infinite-time controller settles the nominal model;
    if a closed-loop state matrix is given build the mapping from its Lyapunov
    solution, otherwise take the first candidate that passes the convergence-rate
    check; then synthesize the switching controller.

    Args:
        model (EulerLagrangeModel): the system
        itc (ControlLaw): infinite-time controller
        tau (float): prescribed horizon in s
        mu_candidates (list, optional): KappaMap or AveragedMap candidates, tried in order
        epsilon (float, optional): switching margin before t0 + tau
        sigma (float, optional): error norm that triggers the switch
        exponential_hint (ndarray, optional): Hurwitz closed-loop matrix of the exponentially stable loop
        x0 (tuple, optional): initial (q, qd) of the nominal run, zeros by default
        t0 (float, optional): start time
        alpha (float, optional): rate factor of the exponential mapping
        horizon (float, optional): horizon of the nominal run
        step (float, optional): integration step of the nominal run
        processes (int, optional): workers for candidate checks
        verbose (bool, optional): True for progress output

    Returns:
        law, designlog (SwitchingPTCLaw, DesignLog): the controller and the record

    Raises:
        NotStabilizing: if the nominal run does not settle
        NoCandidatePassed: if every candidate fails, or the exponential mapping fails; the log is attached
    '''
    n = model.n
    if x0 is None:
        x0 = (np.zeros(n), np.zeros(n))
    traj, error = settlingCheck(model, itc, x0, t0, horizon, step, verbose=verbose)
    if verbose:
        print(f'Nominal run settled to {error:.3g}')

    if exponential_hint is not None:
        solution = solveLyapunov(exponential_hint)
        kmap = exponentialMu(tau, solution.xNorm, alpha)
        designlog = DesignLog('exponential', error, lyapunov=solution)
        designlog.notes.append(f'exponential shortcut: mapping from the Lyapunov solution, alpha={alpha:g}')
        if abs(evalKappa(kmap, 0.0)[1] - 1) > 1e-9:
            designlog.notes.append(f"kappa'(0)={evalKappa(kmap, 0.0)[1]:.6g}: scale initial velocities by kappa'(0)")
        report = checkRateCondition(model, itc, MuMap(kmap), x0, traj=traj)
        designlog.candidates.append((kmap, report))
        log.info('exponential mapping with ||X||=%g, assumption satisfied=%s', solution.xNorm, report.satisfied)
        if not report.satisfied:
            raise NoCandidatePassed(f'the exponential mapping with alpha={alpha:g} failed the assumption '
                                    f'(t_tilde={report.tTilde:g})', log=designlog)
        designlog.chosen = kmap
    else:
        designlog = DesignLog('candidates', error)
        candidates = list(mu_candidates)
        args = [(model, itc, MuMap(k), x0, None, step, t0, traj) for k in candidates]
        if processes == 1 or len(args) <= 1:
            reports = [checkRateCondition(*a) for a in args]
        else:
            with mp.Pool(processes=processes) as p:
                reports = p.starmap(checkRateCondition, args)
        for kmap, report in zip(candidates, reports):
            designlog.candidates.append((kmap, report))
            if not report.satisfied:
                log.info('candidate %s rejected (t_tilde=%g)', kmap.toDict(), report.tTilde)
            elif designlog.chosen is None:
                designlog.chosen = kmap
        if designlog.chosen is None:
            raise NoCandidatePassed(f'none of {len(candidates)} candidate mappings satisfied the assumption', log=designlog)

    law = ptcSwitching(itc, model, designlog.chosen, t0, epsilon, sigma)
    if verbose:
        print(designlog.toText())
    return law, designlog
