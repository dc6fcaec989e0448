'''Fold trigger contact and activation force/work.

The trigger arc (radius r) touches the wall; its joint phi pushes tile 3 at
height h above the theta2 axis through a lever l. Balancing the virtual
work of the wall force F against the thrust T acting at distance d from the
theta1 axis gives F dx = -T d cos(gamma) dtheta1.

Lengths are in mm, forces in N, work in mJ (N.mm), angles in degrees.
'''
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from .exceptions import ArgOutOfRange, BeyondFlip, DoubleContact, \
    InvalidParameter, NoContact, NoConvergence, OutOfRange
from .linkage import joint_curve, loop_theta1
from .types import ContactState
from .utils import checked_derivative

logger = logging.getLogger(__name__)

FLIP_THETA2 = 90.0
# yaw band where two arms hit the wall together
DOUBLE_CONTACT_RANGE = (-45.0, -40.0)
YAW_RANGE = (-45.0, 45.0)
THETA2_STEP = 1e-3
# wall displacement still mapped onto the flip point
STROKE_TOLERANCE = 1e-3
WORK_NODES = 101


@dataclass(frozen=True)
class WorkEstimate:
    '''Activation work (mJ) by the closed form and by integrating F dx.
    '''
    closed_form: float
    integral: float

    def agreement(self):
        '''Relative gap between the two estimates.
        '''
        if self.closed_form == 0.0:
            return abs(self.integral)
        return abs(self.integral / self.closed_form - 1.0)


def check_yaw(psi):
    if not YAW_RANGE[0] < psi <= YAW_RANGE[1]:
        raise InvalidParameter('yaw %.3f deg outside (-45, 45]' % psi)


def is_double_contact(psi):
    return DOUBLE_CONTACT_RANGE[0] <= psi <= DOUBLE_CONTACT_RANGE[1]


def trigger_x(geom, psi, phi):
    '''Wall displacement for a trigger rotation phi at yaw psi.
    '''
    psi = math.radians(psi)
    phi = math.radians(phi)
    return geom.r * (math.sin(psi) - math.sin(psi - phi))


def _phi(geom, theta2, theta2_max):
    cot = lambda a: 1.0 / math.tan(math.radians(a))
    argument = geom.h * (cot(theta2) - cot(theta2_max)) / geom.l
    if abs(argument) > 1.0:
        raise ArgOutOfRange(argument)
    return math.degrees(math.asin(argument))


def phi_from_theta2(geom, theta2, theta2_max):
    '''Trigger angle phi holding tile 3 at theta2.
    '''
    if not 0.0 < theta2 < 180.0:
        raise InvalidParameter('theta2 %.6f deg outside (0, 180)' % theta2)
    if theta2 > theta2_max:
        raise NoContact(theta2, theta2_max)
    return _phi(geom, theta2, theta2_max)


def contact_x(geom, theta2, theta2_max, psi):
    '''Wall displacement at which the arm sits at theta2.

    The contact relation is evaluated past theta2_max too (negative phi) so that
    derivatives can be centred on the flight configuration.
    '''
    return trigger_x(geom, psi, _phi(geom, theta2, theta2_max))


def contact_state(geom, theta2, theta2_max, psi):
    phi = phi_from_theta2(geom, theta2, theta2_max)
    return ContactState(psi, phi, trigger_x(geom, psi, phi), theta2)


def stroke(geom, theta2_max, psi):
    '''Wall displacement bringing the arm from flight to the flip point.
    '''
    return contact_x(geom, FLIP_THETA2, theta2_max, psi)


def theta2_from_x(geom, linkage, x, psi):
    '''Arm angle theta2 reached after the wall moved x mm (root find).
    '''
    check_yaw(psi)
    if x < 0.0:
        raise InvalidParameter('wall displacement must be >= 0, got %.6f' % x)
    theta2_max = linkage.theta2_max
    if x == 0.0:
        return theta2_max
    full = stroke(geom, theta2_max, psi)
    if x > full + STROKE_TOLERANCE:
        raise BeyondFlip(x, full)
    if x >= full:
        return FLIP_THETA2

    def gap(t):
        return contact_x(geom, t, theta2_max, psi) - x

    try:
        theta2, info = brentq(gap, FLIP_THETA2, theta2_max, xtol=1e-12, full_output=True)
    except (RuntimeError, ValueError) as oops:
        raise NoConvergence('theta2 from x=%.6f' % x, abs(x), 0) from oops
    if not info.converged:
        raise NoConvergence('theta2 from x=%.6f' % x, abs(gap(theta2)), info.iterations)
    return theta2


def dtheta1_dx(trigger, linkage, theta2, psi, verify=True):
    '''dtheta1/dx in rad/mm along the contact path at yaw psi.

    dtheta1/dtheta2 and dx/dtheta2 are central differences in theta2; both
    must survive a step halving check when verify is set.
    '''
    theta2_max = linkage.theta2_max
    slope = checked_derivative(lambda t: loop_theta1(linkage, t), theta2,
        THETA2_STEP, verify)
    travel = checked_derivative(lambda t: contact_x(trigger, t, theta2_max, psi),
        theta2, THETA2_STEP, verify)
    # slope is deg/deg, travel mm/deg
    return math.radians(slope / travel)


def force_ratio(trigger, linkage, params, theta2, psi, verify=True):
    '''Balanced wall force over total thrust, F/T.
    '''
    if is_double_contact(psi):
        raise DoubleContact(psi)
    check_yaw(psi)
    if not FLIP_THETA2 < theta2 <= linkage.theta2_max:
        raise OutOfRange(theta2, FLIP_THETA2, linkage.theta2_max)
    gain = params.d * math.cos(math.radians(params.gamma))
    return -gain * dtheta1_dx(trigger, linkage, theta2, psi, verify)


def activation_force(trigger, linkage, params, psi):
    '''Wall force (N) needed to leave the flight configuration.
    '''
    ratio = force_ratio(trigger, linkage, params, linkage.theta2_max, psi)
    return ratio * params.thrust_total


def closed_form_work(linkage, params, thrust=None):
    '''T d cos(gamma) (theta1(theta2_max) - theta1(90)) in mJ.
    '''
    if thrust is None:
        thrust = params.thrust_total
    rise = loop_theta1(linkage, linkage.theta2_max) - loop_theta1(linkage, FLIP_THETA2)
    gain = params.d * math.cos(math.radians(params.gamma))
    return thrust * gain * math.radians(rise)


def force_profile(trigger, linkage, params, psi=0.0, n=WORK_NODES, thrust=None):
    '''Contact path from flight to the flip point as (x, F) arrays.

    n samples are spread evenly in theta2 over [90, theta2_max]; x grows
    from 0 to the stroke while F falls to zero at the flip point.
    '''
    if is_double_contact(psi):
        raise DoubleContact(psi)
    check_yaw(psi)
    if thrust is None:
        thrust = params.thrust_total
    theta2_max = linkage.theta2_max
    gain = params.d * math.cos(math.radians(params.gamma))
    grid = np.linspace(theta2_max, FLIP_THETA2, n)
    x = np.array([contact_x(trigger, t, theta2_max, psi) for t in grid])
    # the flip point itself has a vanishing slope, skip the halving check
    force = np.array([
        -thrust * gain * dtheta1_dx(trigger, linkage, t, psi, verify=False)
        for t in grid
    ])
    return x, force


def _integrated_work(trigger, linkage, params, thrust, psi, n):
    x, force = force_profile(trigger, linkage, params, psi, n, thrust)
    return float(trapezoid(force, x))


def activation_work(trigger, linkage, params, psi=0.0, thrust=None, n=WORK_NODES):
    '''Minimum work (mJ) to push the arm from theta2_max to the flip point.

    Returns both the closed form T d cos(gamma) (theta1(max) - theta1(90))
    and the trapezoidal integral of F dx along the contact path at psi.
    thrust overrides params.thrust_total (zero allowed).
    '''
    if thrust is None:
        thrust = params.thrust_total
    if thrust < 0:
        raise InvalidParameter('thrust must be >= 0, got %r' % thrust)
    estimate = WorkEstimate(
        closed_form_work(linkage, params, thrust),
        _integrated_work(trigger, linkage, params, thrust, psi, n)
    )
    logger.debug('activation work at psi=%.1f: %.6f mJ (closed) / %.6f mJ (integral)',
        psi, estimate.closed_form, estimate.integral)
    return estimate


def activation_summary(trigger, linkage, params, psi):
    '''Activation report for one yaw angle, as a plain dict.
    '''
    report = {
        'psi_deg': psi,
        'double_contact': is_double_contact(psi),
        'activation_force_N': None,
        'work_mJ_closed_form': closed_form_work(linkage, params, params.thrust_total),
        'work_mJ_integral': None,
    }
    if report['double_contact']:
        logger.warning('psi=%.1f deg: two arms touch the wall, no force reported', psi)
        return report
    report['activation_force_N'] = activation_force(trigger, linkage, params, psi)
    report['work_mJ_integral'] = _integrated_work(trigger, linkage, params,
        params.thrust_total, psi, WORK_NODES)
    return report


def trigger_curve(trigger, linkage, theta2_lo, theta2_hi, n, psis):
    '''Rows of (theta2, theta1, theta3, psi, x) for each yaw in psis.
    '''
    curve = joint_curve(linkage, theta2_lo, theta2_hi, n)
    rows = []
    for psi in psis:
        check_yaw(psi)
        for theta2, theta1, theta3 in curve:
            x = contact_x(trigger, theta2, linkage.theta2_max, psi)
            rows.append((theta2, theta1, theta3, psi, x))
    return np.array(rows)


def force_curve(trigger, linkage, params, theta2_lo, theta2_hi, n, psis):
    '''Rows of (theta2, psi, F/T) over a theta2 grid and several yaws.
    '''
    rows = []
    for psi in psis:
        for theta2 in np.linspace(theta2_lo, theta2_hi, n):
            rows.append((theta2, psi, force_ratio(trigger, linkage, params, float(theta2), psi)))
    return np.array(rows)
