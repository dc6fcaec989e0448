'''Collision activation by energy accounting.

A wall collision folds the airframe when the share of the kinetic energy
taken up as trigger work reaches the activation work. Masses are in grams,
speeds in m/s and energies in mJ, since 1 g (m/s)^2 is 1 mJ.
'''
import logging
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DoubleContact, InvalidParameter
from .linkage import fold_state, solve_arm
from .trigger import closed_form_work, is_double_contact

logger = logging.getLogger(__name__)

FLIGHT = 'flight'
FOLDED = 'folded'


@dataclass(frozen=True)
class CollisionScenario:
    '''Impact speed (m/s), yaw (deg), efficiency and required work (mJ).

    required_work None means the model activation work is used.
    '''
    speed: float
    psi: float = 0.0
    efficiency: float = 1.0
    required_work: float = None

    def __post_init__(self):
        if self.speed < 0:
            raise InvalidParameter('impact speed must be >= 0, got %r' % self.speed)
        if not 0.0 < self.efficiency <= 1.0:
            raise InvalidParameter('efficiency must lie in (0, 1], got %r' % self.efficiency)
        if self.required_work is not None and self.required_work < 0:
            raise InvalidParameter('required work must be >= 0, got %r' % self.required_work)


@dataclass(frozen=True)
class CollisionOutcome:
    activates: bool
    energy_margin: float
    final_state: str
    required_work: float
    kinetic_energy: float
    double_contact: bool = False
    arms: tuple = ()

    def as_report(self):
        return {
            'activates': self.activates,
            'energy_margin_mJ': self.energy_margin,
            'final_state': self.final_state,
            'required_work_mJ': self.required_work,
            'kinetic_energy_mJ': self.kinetic_energy,
            'double_contact': self.double_contact,
            'theta1_deg': [arm.theta1 for arm in self.arms],
        }


def kinetic_energy(mass, speed):
    '''K = m v^2 / 2 in mJ for a mass in g and a speed in m/s.
    '''
    if mass <= 0:
        raise InvalidParameter('mass must be positive, got %r' % mass)
    return 0.5 * mass * speed * speed


def min_activation_speed(mass, required_work, efficiency=1.0):
    '''Lowest impact speed (m/s) whose kinetic energy covers required_work.
    '''
    if required_work < 0:
        raise InvalidParameter('required work must be >= 0, got %r' % required_work)
    if mass <= 0:
        raise InvalidParameter('mass must be positive, got %r' % mass)
    return math.sqrt(2.0 * required_work / (efficiency * mass))


def required_work(scenario, trigger, linkage, params):
    if scenario.required_work is not None:
        return scenario.required_work
    return closed_form_work(linkage, params)


def collision_outcome(scenario, trigger, linkage, params):
    '''Decide whether the collision folds the airframe.

    The fold happens when the speed reaches min_activation_speed, the
    threshold included; the folded arms rest with theta1 on the fold limit.
    '''
    work = required_work(scenario, trigger, linkage, params)
    energy = kinetic_energy(params.mass, scenario.speed)
    margin = scenario.efficiency * energy - work
    activates = margin >= 0.0 or \
        scenario.speed >= min_activation_speed(params.mass, work, scenario.efficiency)
    if activates:
        # rounding at the threshold speed
        margin = 0.0 if margin <= 0.0 else margin
    double = is_double_contact(scenario.psi)
    if double:
        logger.warning('%s', DoubleContact(scenario.psi))
    if activates:
        arm = fold_state(linkage)
    else:
        arm = solve_arm(linkage, linkage.theta2_max)
    arms = tuple(arm for _ in range(params.arm_count))
    logger.debug('v=%.4f m/s K=%.4f mJ W=%.4f mJ -> %s', scenario.speed, energy, work,
        FOLDED if activates else FLIGHT)
    return CollisionOutcome(activates, margin, FOLDED if activates else FLIGHT, work,
        energy, double, arms)


def collision_sweep(speeds, trigger, linkage, params, psi=0.0, efficiency=1.0,
        required=None):
    '''Rows of (speed, kinetic energy, margin, activates) over a speed grid.
    '''
    if required is None:
        required = closed_form_work(linkage, params)
    rows = []
    for speed in speeds:
        outcome = collision_outcome(
            CollisionScenario(float(speed), psi, efficiency, required),
            trigger, linkage, params
        )
        rows.append((speed, outcome.kinetic_energy, outcome.energy_margin,
            1.0 if outcome.activates else 0.0))
    return np.array(rows)


def equivalent_efficiency(model_work, measured_work):
    '''Efficiency making the model work account for a measured work.
    '''
    if measured_work <= 0:
        raise InvalidParameter('measured work must be positive, got %r' % measured_work)
    if model_work < 0:
        raise InvalidParameter('model work must be >= 0, got %r' % model_work)
    return model_work / measured_work
