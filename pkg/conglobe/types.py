'''Airframe value types
'''
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import InvalidParameter


def _require(condition, message, *args):
    if not condition:
        raise InvalidParameter(message % args)


@dataclass(frozen=True)
class LinkageGeometry:
    '''Spherical 4R loop of one foldable arm.

    Link i is the angular length of tile i, measured between its two joint
    axes: tile 1 spans J4-J1 (ground), tile 2 J1-J2 (motor), tile 3 J2-J3,
    tile 4 J3-J4 (coupler side). The kite pairs tiles 1/2 and 3/4 so that
    the loop is mirror symmetric about the plane of J1 and J3, which is what
    keeps theta2 equal to theta4.

    The defaults are the loop calibrated on theta1(90)=10 and
    theta1(110)=10.643 deg.
    '''
    link_angles: tuple = (90.0, 90.0, 84.962018, 84.962018)
    joint_offsets: tuple = (-0.075964, 0.0, 0.0, 0.0)
    theta2_max: float = 110.0
    theta1_fold_limit: float = 70.0
    theta1_branch: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'link_angles', tuple(float(a) for a in self.link_angles))
        object.__setattr__(self, 'joint_offsets', tuple(float(a) for a in self.joint_offsets))
        _require(len(self.link_angles) == 4, 'four link angles expected')
        _require(len(self.joint_offsets) == 4, 'four joint offsets expected')
        a1, a2, a3, a4 = self.link_angles
        _require(a1 == a2 and a3 == a4,
            'kite symmetry requires a1 == a2 and a3 == a4, got %r', self.link_angles)
        _require(all(0.0 < a < 180.0 for a in self.link_angles),
            'link angles must lie in (0, 180) deg, got %r', self.link_angles)
        _require(self.joint_offsets[1] == self.joint_offsets[3],
            'joint offsets 2 and 4 must match for a symmetric arm')
        _require(0.0 < self.theta2_max < 180.0,
            'theta2_max must lie in (0, 180) deg, got %r', self.theta2_max)
        _require(self.theta1_branch in (1, -1),
            'theta1_branch must be +1 or -1, got %r', self.theta1_branch)

    @classmethod
    def kite(cls, a12, a34, **kwargs):
        '''Build a kite loop from its two distinct link angles.
        '''
        return cls(link_angles=(a12, a12, a34, a34), **kwargs)

    @property
    def a12(self):
        return self.link_angles[0]

    @property
    def a34(self):
        return self.link_angles[2]


@dataclass(frozen=True)
class CouplerGeometry:
    '''Tapered inner edge of tile 4 driving the central coupler.
    '''
    taper_deg: float = 13.0

    def __post_init__(self):
        _require(0.0 < self.taper_deg < 90.0,
            'coupler taper must lie in (0, 90) deg, got %r', self.taper_deg)


@dataclass(frozen=True)
class TriggerGeometry:
    '''Fold trigger: arc radius r, contact height h and lever length l (mm).
    '''
    r: float = 18.0
    h: float = 5.0
    l: float = 40.0

    def __post_init__(self):
        _require(self.r > 0 and self.h > 0 and self.l > 0,
            'trigger lengths must be positive, got r=%r h=%r l=%r',
            self.r, self.h, self.l)

    def scaled(self, s):
        return replace(self, r=self.r * s, h=self.h * s, l=self.l * s)


@dataclass(frozen=True)
class RobotParams:
    '''Thrust arm d (mm), offset gamma (deg), total thrust (N), mass (g).
    '''
    d: float = 40.0
    gamma: float = 10.0
    thrust_total: float = 0.52
    mass: float = 51.2
    arm_count: int = 4

    def __post_init__(self):
        _require(self.d > 0, 'd must be positive, got %r', self.d)
        _require(0.0 <= self.gamma < 90.0,
            'gamma must lie in [0, 90) deg, got %r', self.gamma)
        _require(self.thrust_total > 0,
            'thrust must be positive, got %r', self.thrust_total)
        _require(self.mass > 0, 'mass must be positive, got %r', self.mass)
        _require(int(self.arm_count) == self.arm_count and self.arm_count > 0,
            'arm_count must be a positive integer, got %r', self.arm_count)

    def scaled(self, s, thrust_exponent=3):
        '''Uniformly scale every length by s.

        Thrust and mass follow s**thrust_exponent (volume scaling by default).
        '''
        k = s ** thrust_exponent
        return replace(self, d=self.d * s, thrust_total=self.thrust_total * k,
            mass=self.mass * k)


@dataclass(frozen=True)
class ArmState:
    '''Joint angles of one arm (deg, right hand rule).
    '''
    theta1: float
    theta2: float
    theta3: float
    theta4: float

    def as_tuple(self):
        return (self.theta1, self.theta2, self.theta3, self.theta4)

    def mirrored(self):
        '''Swap the two arm halves (theta2 <-> theta4).
        '''
        return ArmState(self.theta1, self.theta4, self.theta3, self.theta2)

    def is_symmetric(self):
        return self.theta2 == self.theta4


@dataclass(frozen=True)
class AirframeState:
    '''All arms of the airframe plus the shared coupler rotation (deg).
    '''
    arms: tuple
    coupler_angle: float

    @property
    def theta2(self):
        return self.arms[0].theta2

    @property
    def theta1(self):
        return self.arms[0].theta1


@dataclass(frozen=True)
class ContactState:
    '''Trigger contact at one wall displacement.
    '''
    psi: float
    phi: float
    x: float
    theta2: float


class ForceTrace(object):
    '''Benchtop push experiment: time (s), wall position (mm), force (N).

    Arrays are copied on construction and exposed read-only.
    '''

    def __init__(self, times, positions, forces, psi=0.0, rate=None):
        self.__times = self.__frozen(times)
        self.__positions = self.__frozen(positions)
        self.__forces = self.__frozen(forces)
        _require(len(self.__times) == len(self.__positions) == len(self.__forces),
            'trace columns differ in length')
        if len(self.__times) > 1:
            _require(np.all(np.diff(self.__times) > 0),
                'trace times must be strictly increasing')
        self.__psi = float(psi)
        if rate is None and len(self.__times) > 1:
            rate = 1.0 / float(np.median(np.diff(self.__times)))
        self.__rate = rate

    @staticmethod
    def __frozen(values):
        array = np.array(values, dtype=float)
        array.setflags(write=False)
        return array

    @property
    def times(self):
        return self.__times

    @property
    def positions(self):
        return self.__positions

    @property
    def forces(self):
        return self.__forces

    @property
    def psi(self):
        return self.__psi

    @property
    def rate(self):
        '''Sample rate in Hz (None for a single sample trace).
        '''
        return self.__rate

    def with_forces(self, forces):
        return ForceTrace(self.__times, self.__positions, forces, self.__psi, self.__rate)

    def shifted(self, dx):
        '''Return a copy with every position moved by dx mm.
        '''
        return ForceTrace(self.__times, self.__positions + dx, self.__forces,
            self.__psi, self.__rate)

    def scaled(self, factor):
        '''Return a copy with every force multiplied by factor.
        '''
        return self.with_forces(self.__forces * factor)

    def __len__(self):
        return len(self.__times)

    def __repr__(self):
        return 'ForceTrace(psi=%.1f, samples=%d)' % (self.__psi, len(self))
