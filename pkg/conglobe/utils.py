'''Numeric helpers shared by the model modules.
'''
import math

from .exceptions import DerivativeUnstable

# Relative disagreement tolerated between step h and step h/2.
HALVING_TOLERANCE = 0.05


def wrap_deg(angle):
    '''Normalize an angle to (-180, 180] degrees.
    '''
    return angle - 360.0 * math.ceil((angle - 180.0) / 360.0)


def central_difference(func, x, step):
    return (func(x + step) - func(x - step)) / (2.0 * step)


def checked_derivative(func, x, step, verify=True, tolerance=HALVING_TOLERANCE):
    '''Central difference derivative of func at x with a step halving check.

    The estimates at step and step/2 must agree within `tolerance`
    (relative), otherwise DerivativeUnstable is raised. The returned value
    is the Richardson extrapolation of the two estimates.
    '''
    coarse = central_difference(func, x, step)
    fine = central_difference(func, x, step / 2.0)
    if verify and not halving_consistent(coarse, fine, tolerance):
        raise DerivativeUnstable(coarse, fine)
    return (4.0 * fine - coarse) / 3.0


def halving_consistent(coarse, fine, tolerance=HALVING_TOLERANCE):
    if coarse == fine:
        return True
    if coarse == 0.0:
        return False
    return abs(fine / coarse - 1.0) <= tolerance
