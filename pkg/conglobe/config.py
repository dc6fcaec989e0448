'''Model configuration file.

A model file is a list of `key = value` lines; `#` starts a comment. Keys
left out take the default airframe constants:

    link_angle_a12_deg = 90
    link_angle_a34_deg = 84.962018
    joint_offset_1_deg = -0.075964
    theta2_max_deg = 110
    r_mm = 18
    thrust_N = 0.52
'''
import configparser
import logging
import os
from dataclasses import dataclass, field, replace

from .exceptions import ConfigError
from .linkage import calibrate
from .types import CouplerGeometry, LinkageGeometry, RobotParams, TriggerGeometry

logger = logging.getLogger(__name__)

CONFIG_ENV = 'CONGLOBE_CONFIG'
SECTION = 'model'

# key -> (owner, field, parser)
_KEYS = {
    'link_angle_a12_deg': ('linkage', 'a12', float),
    'link_angle_a34_deg': ('linkage', 'a34', float),
    'joint_offset_1_deg': ('linkage', 'delta1', float),
    'joint_offset_2_deg': ('linkage', 'delta2', float),
    'joint_offset_3_deg': ('linkage', 'delta3', float),
    'joint_offset_4_deg': ('linkage', 'delta4', float),
    'theta2_max_deg': ('linkage', 'theta2_max', float),
    'theta1_fold_limit_deg': ('linkage', 'theta1_fold_limit', float),
    'theta1_branch': ('linkage', 'theta1_branch', int),
    'taper_deg': ('coupler', 'taper_deg', float),
    'r_mm': ('trigger', 'r', float),
    'h_mm': ('trigger', 'h', float),
    'l_mm': ('trigger', 'l', float),
    'd_mm': ('robot', 'd', float),
    'gamma_deg': ('robot', 'gamma', float),
    'thrust_N': ('robot', 'thrust_total', float),
    'mass_g': ('robot', 'mass', float),
    'arm_count': ('robot', 'arm_count', int),
    'calibrate': (None, 'calibrate', None),
}
CONFIG_KEYS = tuple(_KEYS)
_LOOP_KEYS = ('link_angle_a12_deg', 'link_angle_a34_deg', 'joint_offset_1_deg',
    'joint_offset_2_deg', 'joint_offset_3_deg', 'joint_offset_4_deg')


def _boolean(value):
    lowered = str(value).strip().lower()
    if lowered in ('1', 'yes', 'true', 'on'):
        return True
    if lowered in ('0', 'no', 'false', 'off'):
        return False
    raise ValueError('not a boolean: %r' % value)


@dataclass(frozen=True)
class ModelConfig:
    '''Every geometry and parameter set of one airframe model.
    '''
    linkage: LinkageGeometry = field(default_factory=LinkageGeometry)
    coupler: CouplerGeometry = field(default_factory=CouplerGeometry)
    trigger: TriggerGeometry = field(default_factory=TriggerGeometry)
    robot: RobotParams = field(default_factory=RobotParams)

    @classmethod
    def from_mapping(cls, mapping, base=None):
        '''Build a model from config keys (values may be strings).
        '''
        base = base or cls()
        values = {'linkage': {}, 'coupler': {}, 'trigger': {}, 'robot': {}}
        recalibrate = False
        for key, raw in mapping.items():
            if key not in _KEYS:
                raise ConfigError('unknown configuration key %r' % key)
            owner, name, parse = _KEYS[key]
            try:
                if owner is None:
                    recalibrate = _boolean(raw)
                    continue
                values[owner][name] = parse(raw)
            except ValueError as oops:
                raise ConfigError('bad value %r for %s' % (raw, key)) from oops

        loop = values['linkage']
        linkage = base.linkage
        angles = list(linkage.link_angles)
        offsets = list(linkage.joint_offsets)
        if 'a12' in loop:
            angles[0] = angles[1] = loop.pop('a12')
        if 'a34' in loop:
            angles[2] = angles[3] = loop.pop('a34')
        for i in range(4):
            offsets[i] = loop.pop('delta%d' % (i + 1), offsets[i])
        linkage = replace(linkage, link_angles=tuple(angles), joint_offsets=tuple(offsets),
            **loop)
        if recalibrate and not any(key in mapping for key in _LOOP_KEYS):
            limits = {
                'theta2_max': linkage.theta2_max,
                'theta1_fold_limit': linkage.theta1_fold_limit,
                'theta1_branch': linkage.theta1_branch,
            }
            linkage = calibrate(limits=limits, a12=linkage.a12)
        return cls(
            linkage,
            replace(base.coupler, **values['coupler']),
            replace(base.trigger, **values['trigger']),
            replace(base.robot, **values['robot'])
        )

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as f:
                text = f.read()
        except OSError as oops:
            raise ConfigError('cannot read %s: %s' % (path, oops.strerror)) from oops
        parser = configparser.ConfigParser(inline_comment_prefixes=('#',),
            interpolation=None)
        # keys are case sensitive (thrust_N)
        parser.optionxform = str
        try:
            parser.read_string('[%s]\n%s' % (SECTION, text), source=path)
        except configparser.Error as oops:
            raise ConfigError('malformed model file %s: %s' % (path, oops)) from oops
        if parser.sections() != [SECTION]:
            raise ConfigError('%s: sections are not allowed in a model file' % path)
        logger.debug('loading model file %s', path)
        return cls.from_mapping(dict(parser.items(SECTION)))

    def with_overrides(self, mapping):
        return ModelConfig.from_mapping(mapping, base=self)

    def to_mapping(self):
        '''Config keys and values describing this model.
        '''
        linkage = self.linkage
        mapping = {
            'link_angle_a12_deg': linkage.a12,
            'link_angle_a34_deg': linkage.a34,
            'theta2_max_deg': linkage.theta2_max,
            'theta1_fold_limit_deg': linkage.theta1_fold_limit,
            'theta1_branch': linkage.theta1_branch,
            'taper_deg': self.coupler.taper_deg,
            'r_mm': self.trigger.r,
            'h_mm': self.trigger.h,
            'l_mm': self.trigger.l,
            'd_mm': self.robot.d,
            'gamma_deg': self.robot.gamma,
            'thrust_N': self.robot.thrust_total,
            'mass_g': self.robot.mass,
            'arm_count': self.robot.arm_count,
        }
        for i, offset in enumerate(linkage.joint_offsets):
            mapping['joint_offset_%d_deg' % (i + 1)] = offset
        return mapping

    def to_text(self):
        lines = []
        for key in CONFIG_KEYS:
            if key == 'calibrate':
                continue
            value = self.to_mapping()[key]
            lines.append('%s = %s' % (key, value if isinstance(value, int) else '%.6f' % value))
        return '\n'.join(lines) + '\n'


def load_config(path=None):
    '''Model from path, from $CONGLOBE_CONFIG, or the defaults.
    '''
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return ModelConfig()
    return ModelConfig.from_file(path)
