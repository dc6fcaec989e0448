'''Design sweeps, constrained search and scaling laws.

A design point gathers the trigger and robot constants as free variables;
its metrics are the activation force at a reference yaw, the activation work
and the lowest impact speed that folds the airframe.
'''
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from functools import lru_cache

import numpy as np

from .collide import min_activation_speed
from .exceptions import ConglobeError, Infeasible, InvalidParameter
from .linkage import DEFAULT_ANCHORS, calibrate
from .trigger import FLIP_THETA2, activation_force, closed_form_work, phi_from_theta2
from .types import RobotParams, TriggerGeometry

logger = logging.getLogger(__name__)

# sweepable fields and their config/CSV names
POINT_KEYS = {
    'r': 'r_mm',
    'h': 'h_mm',
    'l': 'l_mm',
    'd': 'd_mm',
    'gamma': 'gamma_deg',
    'theta2_max': 'theta2_max_deg',
    'thrust': 'thrust_N',
    'mass': 'mass_g',
    'psi': 'psi_deg',
}
METRIC_KEYS = ('f_activation_N', 'w_activation_mJ', 'v_min_m_s', 'force_ratio',
    'phi_flip_deg')
OBJECTIVES = ('min_work', 'max_force_margin')
CONSTRAINTS = ('min_force_ratio', 'max_work', 'max_speed')
# a constraint is active when its slack is within this fraction of its bound
ACTIVE_FRACTION = 0.01
REFINE_DIVISIONS = 64
MAX_REFINE_EVALUATIONS = 200


@lru_cache(maxsize=16)
def _calibrated(anchors, theta2_max):
    return calibrate(anchors, limits={'theta2_max': theta2_max})


@dataclass(frozen=True)
class DesignPoint:
    '''Trigger (r, h, l mm), robot (d mm, gamma deg, theta2_max deg, thrust N,
    mass g) and the linkage anchors; psi is the reference yaw (deg).
    '''
    r: float = 18.0
    h: float = 5.0
    l: float = 40.0
    d: float = 40.0
    gamma: float = 10.0
    theta2_max: float = 110.0
    thrust: float = 0.52
    mass: float = 51.2
    anchors: tuple = DEFAULT_ANCHORS
    psi: float = 0.0

    def __post_init__(self):
        if min(self.r, self.h, self.l, self.d) <= 0:
            raise InvalidParameter('design lengths must be positive')
        if not 90.0 < self.theta2_max < 180.0:
            raise InvalidParameter('theta2_max must lie in (90, 180) deg, got %r' % self.theta2_max)
        object.__setattr__(self, 'anchors', tuple(tuple(float(v) for v in a) for a in self.anchors))

    def with_values(self, **values):
        return replace(self, **values)

    def scaled(self, s, thrust_exponent=3):
        '''Every length times s, thrust and mass times s**thrust_exponent.
        '''
        k = s ** thrust_exponent
        return replace(self, r=self.r * s, h=self.h * s, l=self.l * s, d=self.d * s,
            thrust=self.thrust * k, mass=self.mass * k)

    def trigger_geometry(self):
        return TriggerGeometry(self.r, self.h, self.l)

    def robot_params(self):
        return RobotParams(self.d, self.gamma, self.thrust, self.mass)

    def linkage_geometry(self):
        return _calibrated(self.anchors, self.theta2_max)

    def as_row(self):
        return tuple(getattr(self, name) for name in POINT_KEYS)


@dataclass(frozen=True)
class DesignMetrics:
    activation_force: float
    activation_work: float
    min_speed: float
    force_ratio: float
    phi_at_flip: float

    def as_row(self):
        return (self.activation_force, self.activation_work, self.min_speed,
            self.force_ratio, self.phi_at_flip)

    def as_report(self):
        return dict(zip(METRIC_KEYS, self.as_row()))


def evaluate(point):
    '''Metrics of a design point (activation work by its closed form).
    '''
    trigger = point.trigger_geometry()
    params = point.robot_params()
    linkage = point.linkage_geometry()
    force = activation_force(trigger, linkage, params, point.psi)
    work = closed_form_work(linkage, params)
    return DesignMetrics(
        force,
        work,
        min_activation_speed(point.mass, work),
        force / point.thrust,
        phi_from_theta2(trigger, FLIP_THETA2, point.theta2_max)
    )


@dataclass(frozen=True)
class SweepRow:
    point: DesignPoint
    metrics: DesignMetrics = None
    error: str = None

    def as_row(self):
        metrics = self.metrics.as_row() if self.metrics else (None,) * len(METRIC_KEYS)
        return self.point.as_row() + metrics + (self.error,)


SWEEP_HEADER = tuple(POINT_KEYS.values()) + METRIC_KEYS + ('error',)


def _evaluate_row(point):
    try:
        return SweepRow(point, evaluate(point))
    except ConglobeError as err:
        logger.info('design point %r failed: %s', point.as_row(), err)
        return SweepRow(point, error='%s: %s' % (type(err).__name__, err))


def grid_points(base, ranges):
    '''Full factorial grid; the first parameter varies slowest.
    '''
    names = list(ranges)
    for name in names:
        if name not in POINT_KEYS:
            raise InvalidParameter('unknown design parameter %r' % name)
    for combo in itertools.product(*(ranges[name] for name in names)):
        yield base.with_values(**{n: float(v) for n, v in zip(names, combo)})


def sweep(base, ranges, workers=None):
    '''Evaluate every point of the grid spanned by ranges (name -> values).

    Failing points carry an error tag instead of metrics. Rows follow grid
    order whatever the number of workers.
    '''
    points = list(grid_points(base, ranges))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        rows = list(executor.map(_evaluate_row, points))
    logger.info('swept %d design points, %d failed', len(rows),
        sum(1 for row in rows if row.error))
    return rows


def grid_values(lo, hi, step):
    '''lo, lo + step, ... up to hi inclusive.
    '''
    if step <= 0:
        raise InvalidParameter('grid step must be positive, got %r' % step)
    if hi < lo:
        raise InvalidParameter('grid upper bound below lower bound')
    count = int(round((hi - lo) / step)) + 1
    return [float(v) for v in np.linspace(lo, lo + (count - 1) * step, count)]


def _slacks(point, metrics, constraints):
    slacks = {}
    for name, bound in constraints.items():
        if name == 'min_force_ratio':
            slacks[name] = (metrics.force_ratio - bound, bound)
        elif name == 'max_work':
            slacks[name] = (bound - metrics.activation_work, bound)
        elif name == 'max_speed':
            slacks[name] = (bound - metrics.min_speed, bound)
        else:
            raise InvalidParameter('unknown constraint %r' % name)
    return slacks


def _feasible(point, metrics, constraints):
    return all(slack >= 0 for slack, _ in _slacks(point, metrics, constraints).values())


def _score(objective, point, metrics, constraints):
    # lower is better
    if objective == 'min_work':
        return metrics.activation_work
    k = constraints.get('min_force_ratio', 0.0)
    return -(metrics.activation_force - k * point.thrust)


@dataclass(frozen=True)
class SearchResult:
    point: DesignPoint
    metrics: DesignMetrics
    objective: str
    score: float
    active_constraints: tuple = field(default_factory=tuple)

    def as_report(self):
        report = {POINT_KEYS[f.name]: getattr(self.point, f.name)
            for f in fields(self.point) if f.name in POINT_KEYS}
        report.update(self.metrics.as_report())
        report['objective'] = self.objective
        report['active_constraints'] = list(self.active_constraints)
        return report


def search(base, ranges, objective='min_work', constraints=None, workers=None):
    '''Best feasible grid point, refined by coordinate descent.

    Each varied parameter is moved by half its grid spacing (or less, as the
    step shrinks) while the move improves the objective, staying inside the
    swept interval.
    '''
    if objective not in OBJECTIVES:
        raise InvalidParameter('objective must be one of %s' % ', '.join(OBJECTIVES))
    constraints = dict(constraints or {})
    for name in constraints:
        if name not in CONSTRAINTS:
            raise InvalidParameter('unknown constraint %r' % name)

    best = None
    for row in sweep(base, ranges, workers):
        if row.metrics is None or not _feasible(row.point, row.metrics, constraints):
            continue
        score = _score(objective, row.point, row.metrics, constraints)
        if best is None or score < best[0]:
            best = (score, row.point, row.metrics)
    if best is None:
        raise Infeasible('no grid point satisfies %s' % sorted(constraints))
    score, point, metrics = best

    steps = {}
    bounds = {}
    for name, values in ranges.items():
        values = sorted(float(v) for v in values)
        if len(values) > 1:
            bounds[name] = (values[0], values[-1])
            steps[name] = (values[-1] - values[0]) / (len(values) - 1) / 2.0
    floor = {name: step / REFINE_DIVISIONS for name, step in steps.items()}
    evaluations = 0
    while steps and evaluations < MAX_REFINE_EVALUATIONS:
        improved = False
        for name in sorted(steps):
            lo, hi = bounds[name]
            for direction in (-1.0, 1.0):
                value = min(max(getattr(point, name) + direction * steps[name], lo), hi)
                if value == getattr(point, name):
                    continue
                candidate = point.with_values(**{name: value})
                evaluations += 1
                try:
                    candidate_metrics = evaluate(candidate)
                except ConglobeError:
                    continue
                if not _feasible(candidate, candidate_metrics, constraints):
                    continue
                candidate_score = _score(objective, candidate, candidate_metrics, constraints)
                if candidate_score < score:
                    score, point, metrics = candidate_score, candidate, candidate_metrics
                    improved = True
        if not improved:
            steps = {n: s / 2.0 for n, s in steps.items() if s / 2.0 >= floor[n]}

    active = tuple(
        name for name, (slack, bound) in sorted(_slacks(point, metrics, constraints).items())
        if slack <= ACTIVE_FRACTION * abs(bound)
    )
    logger.info('search %s: score %.6g, active constraints %s', objective, score, active)
    return SearchResult(point, metrics, objective, score, active)


@dataclass(frozen=True)
class ScaleLaw:
    '''Power laws of a uniform length scaling by s, with thrust ~ s**3.
    '''
    s: float
    force: float = 3.0
    work: float = 4.0
    kinetic: float = 4.0
    speed: float = 0.5

    def __post_init__(self):
        if not self.s > 0:
            raise InvalidParameter('scale factor must be positive, got %r' % self.s)

    def factor(self, quantity):
        return self.s ** getattr(self, quantity)

    def compose(self, other):
        '''The law of scaling by self.s then other.s.
        '''
        if (self.force, self.work, self.kinetic, self.speed) != \
                (other.force, other.work, other.kinetic, other.speed):
            raise InvalidParameter('cannot compose scale laws with different exponents')
        return replace(self, s=self.s * other.s)

    def apply(self, metrics):
        return DesignMetrics(
            metrics.activation_force * self.factor('force'),
            metrics.activation_work * self.factor('work'),
            metrics.min_speed * self.factor('speed'),
            metrics.force_ratio,
            metrics.phi_at_flip
        )


def scale_predict(metrics, s):
    '''Metrics of a design scaled by s, predicted by the power laws.
    '''
    return ScaleLaw(s).apply(metrics)


def scale_recompute(point, s, thrust_exponent=3):
    '''Metrics of the scaled design computed through the full model.
    '''
    return evaluate(point.scaled(s, thrust_exponent))
