'''Airframe model exceptions
'''

class ConglobeError(Exception):
    '''Base class of every error raised by the airframe model.
    '''


class InvalidParameter(ConglobeError):
    '''A value type was built with parameters violating its invariants.
    '''


class ConfigError(ConglobeError):
    '''Malformed model file or unknown configuration key.
    '''


class NoConvergence(ConglobeError):
    '''A root finder stopped without closing its residual.
    '''
    def __init__(self, what, residual, iterations):
        super().__init__()
        self.what = what
        self.residual = residual
        self.iterations = iterations

    def __str__(self):
        return '%s did not converge (residual %.3e after %d evaluations)' % (
            self.what, self.residual, self.iterations
        )


class OutOfRange(ConglobeError):
    '''Input angle outside the domain of the selected assembly branch.
    '''
    def __init__(self, value, lo, hi):
        super().__init__()
        self.value = value
        self.lo = lo
        self.hi = hi

    def __str__(self):
        return 'theta2=%.6f deg outside branch domain [%.6f, %.6f]' % (
            self.value, self.lo, self.hi
        )


class InfeasibleAnchors(ConglobeError):
    '''Calibration anchors cannot be met by any kite geometry.
    '''


class NoContact(ConglobeError):
    '''The trigger tip is not touching tile 3 (theta2 beyond theta2_max).
    '''
    def __init__(self, theta2, theta2_max):
        super().__init__()
        self.theta2 = theta2
        self.theta2_max = theta2_max

    def __str__(self):
        return 'no trigger contact at theta2=%.6f deg (limit %.6f deg)' % (
            self.theta2, self.theta2_max
        )


class ArgOutOfRange(ConglobeError):
    '''An arcsin argument left [-1, 1]: the trigger geometry is unsolvable.
    '''
    def __init__(self, argument):
        super().__init__()
        self.argument = argument

    def __str__(self):
        return 'arcsin argument %.6f outside [-1, 1]' % self.argument


class BeyondFlip(ConglobeError):
    '''The wall displacement exceeds the stroke reaching the flip point.
    '''
    def __init__(self, x, stroke):
        super().__init__()
        self.x = x
        self.stroke = stroke

    def __str__(self):
        return 'x=%.6f mm beyond the %.6f mm stroke to the flip point' % (
            self.x, self.stroke
        )


class DerivativeUnstable(ConglobeError):
    '''Two finite difference estimates disagree under step halving.
    '''
    def __init__(self, coarse, fine):
        super().__init__()
        self.coarse = coarse
        self.fine = fine

    def __str__(self):
        return 'derivative unstable under step halving (%.9g vs %.9g)' % (
            self.coarse, self.fine
        )


class DoubleContact(ConglobeError):
    '''Two arms touch the wall together: the single-contact model is void.
    '''
    def __init__(self, psi):
        super().__init__()
        self.psi = psi

    def __str__(self):
        return 'double contact expected at psi=%.3f deg' % self.psi


class RateTooLow(ConglobeError):
    '''Sample rate does not exceed twice the filter cutoff.
    '''
    def __init__(self, rate, cutoff):
        super().__init__()
        self.rate = rate
        self.cutoff = cutoff

    def __str__(self):
        return 'sample rate %.3f Hz too low for a %.3f Hz cutoff' % (
            self.rate, self.cutoff
        )


class EmptyTrace(ConglobeError):
    '''Force trace holds no sample.
    '''


class RangeOutsideTrace(ConglobeError):
    '''Integration bounds are not covered by the trace positions.
    '''
    def __init__(self, lo, hi, trace_lo, trace_hi):
        super().__init__()
        self.lo = lo
        self.hi = hi
        self.trace_lo = trace_lo
        self.trace_hi = trace_hi

    def __str__(self):
        return 'range [%.6f, %.6f] mm outside trace [%.6f, %.6f] mm' % (
            self.lo, self.hi, self.trace_lo, self.trace_hi
        )


class UnknownTraceFormat(ConglobeError):
    '''File is not a force trace in the expected CSV layout.
    '''


class Infeasible(ConglobeError):
    '''No design point of the search grid satisfies the constraints.
    '''
