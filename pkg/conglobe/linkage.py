'''Closed-loop kinematics of the foldable arm.

Each arm is a spherical 4R loop: the four flexural hinge axes meet at one
point, so every tile is an arc on a sphere and a joint angle is the turn
taken at its vertex. Going round the loop, joint rotations (about z) and
tile spans (about x) compose to the identity when the loop closes:

    Rz(q1) Rx(a2) Rz(q2) Rx(a3) Rz(q3) Rx(a4) Rz(q4) Rx(a1) = I

with q_i = theta_i - delta_i. A joint angle is zero when its two tiles are
coplanar. The loop is a kite (a1 = a2, a3 = a4) mirrored about the plane of
J1 and J3, hence theta2 = theta4 along the whole motion.
'''
import logging
import math
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, least_squares
from scipy.spatial.transform import Rotation

from .exceptions import InfeasibleAnchors, InvalidParameter, NoConvergence, \
    OutOfRange
from .types import AirframeState, ArmState, LinkageGeometry
from .utils import wrap_deg

logger = logging.getLogger(__name__)

CLOSURE_TOLERANCE = 1e-9
MAX_ITERATIONS = 100
SOLVER_TOLERANCE = 1e-12

# theta1(90) from the flight/folded state discussion, theta1(110) from the
# 0.23 mJ activation work (dtheta1 = W / (T d cos(gamma))).
DEFAULT_ANCHORS = ((90.0, 10.0), (110.0, 10.643))
ANCHOR_TOLERANCE = 0.05
CALIBRATION_GUESS = (80.0, 0.0)
# Search bounds of a34 during calibration; the anchors also admit the
# mirror root 90 - a34, a nearly flat tile pair that is discarded.
A34_BOUNDS = (45.0, 135.0)

# theta2 step used when scanning for the fold state
_SCAN_STEP = 1.0


def joint_transform(q):
    '''Homogeneous rotation about a joint axis (z) by q radians.
    '''
    c, s = math.cos(q), math.sin(q)
    return np.array([
        [c, -s, 0.0, 0.0],
        [s, c, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0]
    ])


def link_transform(a):
    '''Homogeneous rotation spanning a tile (about x) by a radians.

    Joint axes are concurrent so the translation part is always zero.
    '''
    c, s = math.cos(a), math.sin(a)
    return np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, c, -s, 0.0],
        [0.0, s, c, 0.0],
        [0.0, 0.0, 0.0, 1.0]
    ])


def _spans(geom):
    '''Tile spans in loop order, starting after J1 (radians).
    '''
    a1, a2, a3, a4 = np.radians(geom.link_angles)
    return (a2, a3, a4, a1)


def _loop_transform(spans, q):
    transform = np.eye(4)
    for qi, ai in zip(q, spans):
        transform = transform @ joint_transform(qi) @ link_transform(ai)
    return transform


def _loop_residual(spans, q):
    transform = _loop_transform(spans, q)
    return Rotation.from_matrix(transform[:3, :3]).as_rotvec()


def _loop_angles(geom, state):
    return np.radians(np.subtract(state.as_tuple(), geom.joint_offsets))


def loop_transform(geom, state):
    '''Product of the eight homogeneous transforms around the loop.
    '''
    return _loop_transform(_spans(geom), _loop_angles(geom, state))


def closure_residual(geom, state):
    '''Rotation vector (radians) of the loop product; zero iff closed.
    '''
    return _loop_residual(_spans(geom), _loop_angles(geom, state))


def _kite_seed(geom, theta2):
    '''Closed-form symmetric configuration for a given theta2.

    The diagonal J1-J3 splits the kite into two mirrored spherical
    triangles (tile 2, tile 3, diagonal); spherical cosine rules give the
    half angles at J1 and J3. Returns (theta1, theta3) in degrees or None
    when the triangle does not exist.
    '''
    s = geom.theta1_branch
    q2 = math.radians(theta2 - geom.joint_offsets[1])
    interior2 = math.pi - s * q2
    if not 0.0 < interior2 < math.pi:
        return None
    alpha = math.radians(geom.a12)
    beta = math.radians(geom.a34)
    cos_c = math.cos(alpha) * math.cos(beta) + \
        math.sin(alpha) * math.sin(beta) * math.cos(interior2)
    c = math.acos(max(-1.0, min(1.0, cos_c)))
    sin_c = math.sin(c)
    if sin_c < 1e-12:
        return None
    cos_a = (math.cos(beta) - math.cos(alpha) * cos_c) / (math.sin(alpha) * sin_c)
    cos_g = (math.cos(alpha) - math.cos(beta) * cos_c) / (math.sin(beta) * sin_c)
    half1 = math.acos(max(-1.0, min(1.0, cos_a)))
    half3 = math.acos(max(-1.0, min(1.0, cos_g)))
    q1 = s * (math.pi - 2.0 * half1)
    q3 = s * (math.pi - 2.0 * half3)
    return (
        wrap_deg(math.degrees(q1) + geom.joint_offsets[0]),
        wrap_deg(math.degrees(q3) + geom.joint_offsets[2])
    )


def _polish(fun, x0, what):
    x0 = np.asarray(x0, dtype=float)
    if np.linalg.norm(fun(x0)) <= SOLVER_TOLERANCE:
        # closed-form seeds usually close the loop already
        return x0
    result = least_squares(fun, x0, method='lm', xtol=SOLVER_TOLERANCE,
        ftol=SOLVER_TOLERANCE, gtol=SOLVER_TOLERANCE,
        max_nfev=MAX_ITERATIONS * (len(x0) + 1))
    residual = float(np.linalg.norm(result.fun))
    if residual > CLOSURE_TOLERANCE:
        raise NoConvergence(what, residual, result.nfev)
    return result.x


def _solve(geom, theta2, guess=None):
    '''Close the loop at theta2 without checking the joint limits.

    guess is a (theta1, theta3) pair in degrees; by default the closed-form
    kite configuration is used.
    '''
    if guess is None:
        guess = _kite_seed(geom, theta2)
        if guess is None:
            raise OutOfRange(theta2, -180.0, 180.0)
    spans = _spans(geom)
    d1, d2, d3, d4 = np.radians(geom.joint_offsets)
    q2 = math.radians(theta2) - d2
    q4 = math.radians(theta2) - d4
    x0 = np.radians(guess) - (d1, d3)

    def residual(x):
        return _loop_residual(spans, (x[0], q2, x[1], q4))

    x = _polish(residual, x0, 'closure at theta2=%.6f' % theta2)
    return ArmState(
        wrap_deg(math.degrees(x[0] + d1)),
        theta2,
        wrap_deg(math.degrees(x[1] + d3)),
        theta2
    )


def loop_theta1(geom, theta2):
    '''theta1 of the closed loop at theta2, joint limits not enforced.

    Finite differences taken at theta2_max step slightly past the limit.
    '''
    return _solve(geom, theta2).theta1


@lru_cache(maxsize=64)
def branch_domain(geom):
    '''theta2 interval [fold state, theta2_max] of the selected branch.

    On the mirrored branch (theta1_branch = -1) the limits apply to the
    negated angles and the returned interval is mirrored too.
    '''
    s = geom.theta1_branch
    limit = geom.theta1_fold_limit

    def excess(t):
        seed = _kite_seed(geom, s * t)
        if seed is None:
            return math.inf
        return s * seed[0] - limit

    hi = geom.theta2_max
    if excess(hi) > 0:
        raise InvalidParameter('theta1 exceeds its fold limit at theta2_max')
    t = hi
    while excess(t) < 0:
        if t <= _SCAN_STEP:
            raise InvalidParameter('theta1 never reaches its fold limit on this branch')
        t -= _SCAN_STEP
    # past the last step theta1 crossed the limit or the loop stopped closing
    lo = brentq(lambda u: min(excess(u), 1.0), t, t + _SCAN_STEP, xtol=1e-12)
    logger.debug('branch %+d domain [%.6f, %.6f]', s, lo, hi)
    return (lo, hi) if s > 0 else (-hi, -lo)


def _check_domain(geom, theta2):
    lo, hi = branch_domain(geom)
    slack = 1e-9
    if not lo - slack <= theta2 <= hi + slack:
        raise OutOfRange(theta2, lo, hi)


def solve_arm(geom, theta2, guess=None):
    '''Solve (theta1, theta3) for a given theta2 = theta4 (degrees).

    guess, a (theta1, theta3) pair, replaces the closed-form kite seed as
    the starting point of the root finder.
    '''
    _check_domain(geom, theta2)
    return _solve(geom, theta2, guess)


def solve_unconstrained(geom, theta2, guess):
    '''Close the loop with theta1, theta3 and theta4 all free.

    guess is an ArmState; its theta2 is ignored.
    '''
    spans = _spans(geom)
    offsets = np.radians(geom.joint_offsets)
    q2 = math.radians(theta2) - offsets[1]
    x0 = np.radians((guess.theta1, guess.theta3, guess.theta4)) - offsets[[0, 2, 3]]

    def residual(x):
        return _loop_residual(spans, (x[0], q2, x[1], x[2]))

    x = _polish(residual, x0, 'free closure at theta2=%.6f' % theta2)
    theta1, theta3, theta4 = np.degrees(x + offsets[[0, 2, 3]])
    return ArmState(wrap_deg(theta1), theta2, wrap_deg(theta3), wrap_deg(theta4))


def fold_state(geom):
    '''Folded configuration: theta1 resting on its fold limit.
    '''
    lo, hi = branch_domain(geom)
    theta2 = lo if geom.theta1_branch > 0 else hi
    return _solve(geom, theta2)


def joint_curve(geom, theta2_lo, theta2_hi, n):
    '''Table of (theta2, theta1, theta3) rows over a theta2 sweep.

    Each sample starts from the kite seed; the previous sample is only used
    where the seed does not exist.
    '''
    if n < 2:
        raise InvalidParameter('a joint curve needs at least 2 samples')
    rows = np.empty((n, 3))
    guess = None
    for i, theta2 in enumerate(np.linspace(theta2_lo, theta2_hi, n)):
        theta2 = float(theta2)
        state = solve_arm(geom, theta2, _kite_seed(geom, theta2) or guess)
        rows[i] = (state.theta2, state.theta1, state.theta3)
        guess = (state.theta1, state.theta3)
    return rows


def motor_position(geom, params, theta2):
    '''Thrust point in the ground frame (mm).

    x runs along the theta1 axis, y points outwards along the arm and z up;
    the point sits on tile 2 at distance d from the theta1 axis, raised by
    the offset angle gamma.
    '''
    state = solve_arm(geom, theta2)
    angle = math.radians(state.theta1 + params.gamma)
    return np.array([0.0, params.d * math.cos(angle), params.d * math.sin(angle)])


def motor_path(geom, params, theta2_lo, theta2_hi, n):
    '''Rows of (theta2, theta1, z) tracing the motor height along the fold.
    '''
    curve = joint_curve(geom, theta2_lo, theta2_hi, n)
    z = params.d * np.sin(np.radians(curve[:, 1] + params.gamma))
    return np.column_stack((curve[:, 0], curve[:, 1], z))


def _edge_azimuth(coupler, q4):
    # top view azimuth of the tapered edge of tile 4 rotated by q4
    return math.atan(math.tan(math.radians(coupler.taper_deg)) * math.cos(q4))


def coupler_rotation(geom, coupler, theta4):
    '''Top-view rotation of the coupler (deg), zero in flight.

    The tapered top edge of tile 4 sweeps a cone around the theta4 axis with
    its apex at the airframe center; its projection stays radial and turns
    as tile 4 rotates.
    '''
    solve_arm(geom, theta4)
    offset = geom.joint_offsets[3]
    flight = _edge_azimuth(coupler, math.radians(geom.theta2_max - offset))
    current = _edge_azimuth(coupler, math.radians(theta4 - offset))
    return math.degrees(current - flight)


def airframe_state(geom, coupler, theta2, arm_count=4):
    '''Every arm at the same fold angle, synchronized by the coupler.
    '''
    arm = solve_arm(geom, theta2)
    arms = tuple(arm for _ in range(arm_count))
    angles = {coupler_rotation(geom, coupler, a.theta4) for a in arms}
    if len(angles) != 1:
        raise NoConvergence('coupler synchronization', max(angles) - min(angles), 0)
    return AirframeState(arms, angles.pop())


def calibrate(anchors=DEFAULT_ANCHORS, limits=None, a12=90.0, guess=CALIBRATION_GUESS):
    '''Fit a34 and the theta1 offset so that solve_arm meets two anchors.

    anchors holds two (theta2, theta1) pairs in degrees. limits optionally
    overrides theta2_max / theta1_fold_limit of the returned geometry.
    '''
    anchors = [tuple(map(float, a)) for a in anchors]
    if len(anchors) != 2:
        raise InfeasibleAnchors('exactly two anchors are needed, got %d' % len(anchors))
    (t2a, t1a), (t2b, t1b) = sorted(anchors)
    if t2a == t2b:
        raise InfeasibleAnchors('anchors share theta2=%.6f deg' % t2a)
    if a12 == 90.0:
        # theta1 is symmetric about theta2=90 and grows away from it
        near, far = sorted(((abs(t2a - 90.0), t1a), (abs(t2b - 90.0), t1b)))
        if near[0] != far[0] and far[1] <= near[1]:
            raise InfeasibleAnchors('anchors demand theta1 non-monotone away from theta2=90')
    limits = dict(limits or {})

    def geometry(x):
        return LinkageGeometry.kite(a12, x[0], joint_offsets=(x[1], 0.0, 0.0, 0.0), **limits)

    def residual(x):
        geom = geometry(x)
        return [_solve(geom, t2).theta1 - t1 for t2, t1 in ((t2a, t1a), (t2b, t1b))]

    result = least_squares(residual, guess, bounds=((A34_BOUNDS[0], -90.0), (A34_BOUNDS[1], 90.0)),
        xtol=1e-14, ftol=1e-14, gtol=1e-14)
    error = float(np.max(np.abs(result.fun)))
    if error > ANCHOR_TOLERANCE:
        if np.any(result.active_mask != 0):
            raise InfeasibleAnchors('no kite geometry meets the anchors (miss %.4f deg)' % error)
        raise NoConvergence('calibration', error, result.nfev)
    geom = geometry(result.x)
    logger.info('calibrated a34=%.6f deg, delta1=%.6f deg (miss %.2e deg)',
        geom.a34, geom.joint_offsets[0], error)
    return geom
