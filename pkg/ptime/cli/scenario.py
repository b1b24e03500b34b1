import os
import copy
try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, fields
from importlib import resources

import numpy as np
import tomli_w

from ptime.errors import DomainError, ScenarioError
from ptime.timewarp import KappaMap, AveragedMap, Family, TERM_WIDTH, mappingFromDict
from ptime.dynamics import TwoLinkParams, twoLinkModel
from ptime.controllers import (LawKind, JointLimitPotential, pdGravityITC, feedbackLinearizationITC,
                               ptcSynthesize, ptcSwitching)
from ptime.sim import DisturbanceModel

LAWS = ('pd_gravity', 'feedback_linearization')
KINDS = tuple(k.value for k in LawKind)
VARIANTS = ('itc', 'ptc')
HOLDS = ('stage', 'zoh')
DISTURBANCES = ('none', 'wiener')
SCALINGS = ('sqrt_step', 'per_sample')
TABLES = ('name', 'model', 'controller', 'initial', 'simulation', 'disturbance', 'design', 'output')


def _path(prefix, key):
    return f'{prefix}.{key}' if prefix else key


def _table(d, path):
    if d is None:
        return {}
    if not isinstance(d, dict):
        raise ScenarioError(path, f'expected a table, got {type(d).__name__}')
    return d


def _unknown(d, allowed, path):
    for key in d:
        if key not in allowed:
            raise ScenarioError(_path(path, key), f'unknown key, expected one of {sorted(allowed)}')


def _number(value, path, positive=False, nonneg=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(path, f'expected a number, got {value!r}')
    value = float(value)
    if not np.isfinite(value):
        raise ScenarioError(path, f'must be finite, got {value}')
    if positive and not value > 0:
        raise ScenarioError(path, f'must be positive, got {value}')
    if nonneg and value < 0:
        raise ScenarioError(path, f'must be nonnegative, got {value}')
    return value


def _integer(value, path, minimum=0):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(path, f'expected an integer, got {value!r}')
    if value < minimum:
        raise ScenarioError(path, f'must be at least {minimum}, got {value}')
    return value


def _choice(value, choices, path):
    if value not in choices:
        raise ScenarioError(path, f'expected one of {list(choices)}, got {value!r}')
    return value


def _vector(value, n, path):
    if not isinstance(value, list) or len(value) != n:
        raise ScenarioError(path, f'expected a list of {n} numbers, got {value!r}')
    return [_number(v, f'{path}[{i}]') for i, v in enumerate(value)]


def _matrix(value, n, path):
    if not isinstance(value, list) or len(value) != n:
        raise ScenarioError(path, f'expected {n} rows of {n} numbers, got {value!r}')
    return [_vector(row, n, f'{path}[{i}]') for i, row in enumerate(value)]


def _averaged(d, path):
    _unknown(d, ('family', 'maps', 'tau'), path)
    maps = d.get('maps')
    if not isinstance(maps, list) or len(maps) == 0:
        raise ScenarioError(_path(path, 'maps'), 'expected a nonempty list of mapping tables')
    parts = []
    for i, part in enumerate(maps):
        ppath = f'{path}.maps[{i}]'
        if isinstance(part, dict) and part.get('family') == Family.MU_AVERAGE.value:
            raise ScenarioError(_path(ppath, 'family'), 'averaged mappings cannot be nested')
        parts.append(_kappa(part, ppath))
    try:
        amap = AveragedMap(tuple(KappaMap.fromDict(part) for part in parts))
    except DomainError as e:
        raise ScenarioError(_path(path, 'maps'), str(e)) from e
    if 'tau' in d and _number(d['tau'], _path(path, 'tau'), positive=True) != amap.tau:
        raise ScenarioError(_path(path, 'tau'), f'must equal the horizon {amap.tau:g} of the maps')
    return amap.toDict()


def _kappa(d, path):
    d = _table(d, path)
    if d.get('family') == Family.MU_AVERAGE.value:
        return _averaged(d, path)
    _unknown(d, ('family', 'terms', 'tau'), path)
    for key in ('family', 'terms', 'tau'):
        if key not in d:
            raise ScenarioError(_path(path, key), 'missing key')
    family = Family(_choice(d['family'], [f.value for f in Family], _path(path, 'family')))
    width = TERM_WIDTH[family]
    terms = d['terms']
    if not isinstance(terms, list) or len(terms) == 0:
        raise ScenarioError(_path(path, 'terms'), 'expected a nonempty list of coefficient lists')
    terms = [_vector(term, width, f'{path}.terms[{i}]') for i, term in enumerate(terms)]
    tau = _number(d['tau'], _path(path, 'tau'), positive=True)
    try:
        KappaMap(family, tuple(tuple(term) for term in terms), tau)
    except DomainError as e:
        raise ScenarioError(path, str(e)) from e
    return {'family': family.value, 'terms': terms, 'tau': tau}


def _model(d):
    d = _table(d, 'model')
    params = [f.name for f in fields(TwoLinkParams)]
    _unknown(d, ['kind', 'form'] + params, 'model')
    out = {'kind': _choice(d.get('kind', 'two_link'), ('two_link',), 'model.kind'),
           'form': _choice(d.get('form', 'printed'), ('printed', 'standard'), 'model.form')}
    defaults = TwoLinkParams()
    for name in params:
        out[name] = _number(d.get(name, getattr(defaults, name)), f'model.{name}', positive=True)
    return out


def _jointLimits(d, n):
    path = 'controller.joint_limits'
    d = _table(d, path)
    _unknown(d, ('bounds', 'influence', 'gain'), path)
    bounds = _table(d.get('bounds'), f'{path}.bounds')
    if not bounds:
        raise ScenarioError(f'{path}.bounds', 'expected at least one joint')
    out = {}
    for key, value in bounds.items():
        kpath = f'{path}.bounds.{key}'
        if not str(key).isdigit() or not 1 <= int(key) <= n:
            raise ScenarioError(kpath, f'joint keys are 1-based indices up to {n}')
        lo, hi = _vector(value, 2, kpath)
        if not lo < hi:
            raise ScenarioError(kpath, f'lower bound {lo} must be below upper bound {hi}')
        out[str(int(key))] = [lo, hi]
    return {'bounds': out,
            'influence': _number(d.get('influence', 0.5), f'{path}.influence', positive=True),
            'gain': _number(d.get('gain', 1e-9), f'{path}.gain', positive=True)}


def _controller(d, n):
    d = _table(d, 'controller')
    _unknown(d, ('law', 'kind', 'target', 'P', 'D', 't0', 'epsilon', 'sigma', 'literal_norm', 'kappa',
                 'joint_limits'), 'controller')
    for key in ('target', 'P', 'D', 'kappa'):
        if key not in d:
            raise ScenarioError(f'controller.{key}', 'missing key')
    out = {'law': _choice(d.get('law', 'pd_gravity'), LAWS, 'controller.law'),
           'kind': _choice(d.get('kind', LawKind.PTC_SWITCHING.value), KINDS, 'controller.kind'),
           'target': _vector(d['target'], n, 'controller.target'),
           'P': _matrix(d['P'], n, 'controller.P'),
           'D': _matrix(d['D'], n, 'controller.D'),
           't0': _number(d.get('t0', 0.0), 'controller.t0', nonneg=True),
           'kappa': _kappa(d['kappa'], 'controller.kappa')}
    tau = out['kappa']['tau']
    out['epsilon'] = _number(d.get('epsilon', 1.0), 'controller.epsilon', positive=True)
    if not out['epsilon'] < tau:
        raise ScenarioError('controller.epsilon', f'must be below tau={tau:g}, got {out["epsilon"]:g}')
    out['sigma'] = _number(d.get('sigma', 0.0), 'controller.sigma', nonneg=True)
    literal = d.get('literal_norm', False)
    if not isinstance(literal, bool):
        raise ScenarioError('controller.literal_norm', f'expected true or false, got {literal!r}')
    out['literal_norm'] = literal
    if 'joint_limits' in d:
        if out['law'] != 'pd_gravity':
            raise ScenarioError('controller.joint_limits', 'only the pd_gravity law takes joint limits')
        out['joint_limits'] = _jointLimits(d['joint_limits'], n)
    return out


def _initial(d, n):
    d = _table(d, 'initial')
    _unknown(d, ('q', 'qd'), 'initial')
    return {'q': _vector(d.get('q', [0.0] * n), n, 'initial.q'),
            'qd': _vector(d.get('qd', [0.0] * n), n, 'initial.qd')}


def _simulation(d):
    d = _table(d, 'simulation')
    _unknown(d, ('horizon', 'step', 'hold', 'diverge'), 'simulation')
    out = {'horizon': _number(d.get('horizon', 20.0), 'simulation.horizon', positive=True),
           'step': _number(d.get('step', 1e-3), 'simulation.step', positive=True),
           'hold': _choice(d.get('hold', 'stage'), HOLDS, 'simulation.hold'),
           'diverge': _number(d.get('diverge', 1e6), 'simulation.diverge', positive=True)}
    if out['step'] > out['horizon']:
        raise ScenarioError('simulation.step', f'step {out["step"]:g} exceeds the horizon {out["horizon"]:g}')
    return out


def _disturbance(d):
    d = _table(d, 'disturbance')
    _unknown(d, ('kind', 'std', 'seed', 'seeds', 'scaling'), 'disturbance')
    return {'kind': _choice(d.get('kind', 'none'), DISTURBANCES, 'disturbance.kind'),
            'std': _number(d.get('std', 0.1), 'disturbance.std', nonneg=True),
            'seed': _integer(d.get('seed', 0), 'disturbance.seed'),
            'seeds': _integer(d.get('seeds', 1), 'disturbance.seeds', minimum=1),
            'scaling': _choice(d.get('scaling', 'sqrt_step'), SCALINGS, 'disturbance.scaling')}


def _design(d, controller):
    d = _table(d, 'design')
    _unknown(d, ('candidates', 'exponential_hint', 'alpha', 'horizon', 'step', 'processes'), 'design')
    candidates = d.get('candidates', [controller['kappa']])
    if not isinstance(candidates, list):
        raise ScenarioError('design.candidates', 'expected a list of mapping tables')
    out = {'candidates': [_kappa(c, f'design.candidates[{i}]') for i, c in enumerate(candidates)]}
    hint = d.get('exponential_hint', False)
    if not isinstance(hint, bool):
        raise ScenarioError('design.exponential_hint', f'expected true or false, got {hint!r}')
    out['exponential_hint'] = hint
    alpha = _number(d.get('alpha', 0.45), 'design.alpha', positive=True)
    if not alpha < 0.5:
        raise ScenarioError('design.alpha', f'must lie in (0, 0.5), got {alpha}')
    out['alpha'] = alpha
    if 'horizon' in d:
        out['horizon'] = _number(d['horizon'], 'design.horizon', positive=True)
    out['step'] = _number(d.get('step', 1e-2), 'design.step', positive=True)
    out['processes'] = _integer(d.get('processes', 1), 'design.processes', minimum=1)
    return out


def _output(d):
    d = _table(d, 'output')
    _unknown(d, ('directory',), 'output')
    directory = d.get('directory', 'runs')
    if not isinstance(directory, str) or not directory:
        raise ScenarioError('output.directory', f'expected a nonempty string, got {directory!r}')
    return {'directory': directory}


@dataclass
class Scenario:
    """
    Validated experiment description

    Every table is stored normalized: all defaults filled in, numbers as
    floats, angles in degrees as written in the file. The builders convert
    to radians.

    Attributes:
        name (str): scenario name, used for output subdirectories
        model (dict): model kind, form and physical parameters
        controller (dict): law, kind, target, gains, mapping and switching parameters
        initial (dict): initial q and qd in degrees and degrees per second
        simulation (dict): horizon, step, hold and divergence threshold
        disturbance (dict): disturbance kind, intensity, seed and seed count
        design (dict): candidate mappings and design pipeline options
        output (dict): output directory
    """
    name: str
    model: dict
    controller: dict
    initial: dict = field(default_factory=dict)
    simulation: dict = field(default_factory=dict)
    disturbance: dict = field(default_factory=dict)
    design: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    @classmethod
    def fromDict(cls, d, name=None):
        '''
        Validate and normalize a parsed scenario

        Raises:
            ScenarioError: naming the dotted path of the first invalid key
        '''
        d = _table(d, '')
        if not d:
            raise ScenarioError('', 'empty scenario, expected at least the model and controller tables')
        _unknown(d, TABLES, '')
        if 'controller' not in d:
            raise ScenarioError('controller', 'missing table')
        name = d.get('name', name or 'scenario')
        if not isinstance(name, str) or not name:
            raise ScenarioError('name', f'expected a nonempty string, got {name!r}')
        model = _model(d.get('model'))
        n = 2
        controller = _controller(d['controller'], n)
        return cls(name, model, controller, _initial(d.get('initial'), n), _simulation(d.get('simulation')),
                   _disturbance(d.get('disturbance')), _design(d.get('design'), controller), _output(d.get('output')))

    def toDict(self):
        '''Normalized nested dict, fromDict(toDict()) reproduces the scenario'''
        return copy.deepcopy({'name': self.name, 'model': self.model, 'controller': self.controller,
                              'initial': self.initial, 'simulation': self.simulation,
                              'disturbance': self.disturbance, 'design': self.design, 'output': self.output})

    def toToml(self):
        return tomli_w.dumps(self.toDict())

    def override(self, step=None, horizon=None, seed=None, seeds=None, disturbed=None, directory=None):
        '''Copy with command-line overrides applied and validated again'''
        d = self.toDict()
        if step is not None:
            d['simulation']['step'] = step
        if horizon is not None:
            d['simulation']['horizon'] = horizon
        if seed is not None:
            d['disturbance']['seed'] = seed
        if seeds is not None:
            d['disturbance']['seeds'] = seeds
        if disturbed:
            d['disturbance']['kind'] = 'wiener'
        if directory is not None:
            d['output']['directory'] = directory
        return Scenario.fromDict(d)

    @property
    def n(self):
        return len(self.controller['target'])

    @property
    def target(self):
        return np.radians(self.controller['target'])

    def buildModel(self):
        m = self.model
        params = TwoLinkParams(**{f.name: m[f.name] for f in fields(TwoLinkParams)})
        return twoLinkModel(params, m['form'])

    def buildKappa(self, index=None):
        '''The controller mapping, or design candidate index'''
        d = self.controller['kappa'] if index is None else self.design['candidates'][index]
        return mappingFromDict(d)

    def buildLimit(self):
        d = self.controller.get('joint_limits')
        if d is None:
            return None
        limits = {int(j) - 1: tuple(np.radians(b)) for j, b in d['bounds'].items()}
        return JointLimitPotential(self.n, limits, np.radians(d['influence']), d['gain'])

    def buildITC(self, model):
        '''
        Raises:
            GainSignError: if P or D is not negative definite
        '''
        c = self.controller
        P, D = np.array(c['P']), np.array(c['D'])
        if c['law'] == 'pd_gravity':
            return pdGravityITC(model, P, D, self.target, self.buildLimit())
        return feedbackLinearizationITC(model, P, D, self.target)

    def variantKind(self, variant=None):
        '''Law kind run for a variant: 'itc', 'ptc' or None for the configured kind'''
        kind = self.controller['kind']
        if variant is None:
            return kind
        _choice(variant, VARIANTS, 'variant')
        if variant == 'itc':
            return LawKind.ITC.value
        return LawKind.PTC_SWITCHING.value if kind == LawKind.ITC.value else kind

    def buildLaw(self, model, variant=None, kappa=None):
        c = self.controller
        kind = self.variantKind(variant)
        itc = self.buildITC(model)
        if kind == LawKind.ITC.value:
            return itc
        kappa = self.buildKappa() if kappa is None else kappa
        if kind == LawKind.PTC.value:
            return ptcSynthesize(itc, model, kappa, c['t0'])
        return ptcSwitching(itc, model, kappa, c['t0'], c['epsilon'], np.radians(c['sigma']), c['literal_norm'])

    def initialState(self):
        return np.radians(self.initial['q']), np.radians(self.initial['qd'])

    def disturbanceModel(self, seed=None):
        d = self.disturbance
        if d['kind'] == 'none':
            return DisturbanceModel()
        return DisturbanceModel('wiener', d['std'], d['seed'] if seed is None else seed, scaling=d['scaling'])

    @property
    def seeds(self):
        d = self.disturbance
        return list(range(d['seed'], d['seed'] + d['seeds']))

    def fragment(self, law):
        '''Controller table for a synthesized switching law, angles in degrees'''
        c = copy.deepcopy(self.controller)
        c['kind'] = law.kind.value
        c['kappa'] = law.kappa.toDict()
        c['t0'] = float(law.t0)
        c['epsilon'] = float(law.epsilon)
        c['sigma'] = float(np.degrees(law.sigma))
        c['literal_norm'] = bool(law.literal_norm)
        return {'controller': c}


def bundled():
    '''Names of the scenarios shipped with the package'''
    return sorted(p.name[:-5] for p in resources.files('ptime.scenarios').iterdir() if p.name.endswith('.toml'))


def loadScenario(source):
    '''
    Read a scenario from a TOML file or by bundled name

    Args:
        source (str): file path, or the name of a bundled scenario

    Returns:
        scenario (Scenario): the validated scenario

    Raises:
        ScenarioError: if the file is missing, is not valid TOML, or fails validation

    Examples:
        >>> from ptime.cli import loadScenario
        >>> scenario = loadScenario('two_link_reach')
        >>> scenario.controller['kappa']['tau']
        20.0
    '''
    if os.path.isfile(source):
        name = os.path.splitext(os.path.basename(source))[0]
        with open(source, 'rb') as f:
            text = f.read()
    elif source in bundled():
        name = source
        text = resources.files('ptime.scenarios').joinpath(f'{source}.toml').read_bytes()
    else:
        raise ScenarioError('', f'no scenario file or bundled scenario named {source!r} (bundled: {bundled()})')
    try:
        d = tomllib.loads(text.decode('utf-8'))
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError('', f'{source}: {e}') from e
    return Scenario.fromDict(d, name)
