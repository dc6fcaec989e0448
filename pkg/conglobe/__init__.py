'''Collision-triggered foldable quadrotor airframe model
'''

from .types import LinkageGeometry, CouplerGeometry, TriggerGeometry, RobotParams, \
    ArmState, AirframeState, ContactState, ForceTrace
from .linkage import calibrate, closure_residual, solve_arm, joint_curve, \
    motor_position, coupler_rotation, airframe_state, fold_state
from .trigger import trigger_x, phi_from_theta2, theta2_from_x, force_ratio, \
    activation_force, activation_work
from .collide import CollisionScenario, kinetic_energy, min_activation_speed, \
    collision_outcome
from .measure import lowpass, peak_align, work_done, compare_dataset, load_trace
from .design import DesignPoint, ScaleLaw, sweep, search, scale_predict
from .config import ModelConfig, load_config

__all__ = [
    'LinkageGeometry',
    'CouplerGeometry',
    'TriggerGeometry',
    'RobotParams',
    'ArmState',
    'AirframeState',
    'ContactState',
    'ForceTrace',
    'calibrate',
    'closure_residual',
    'solve_arm',
    'joint_curve',
    'motor_position',
    'coupler_rotation',
    'airframe_state',
    'fold_state',
    'trigger_x',
    'phi_from_theta2',
    'theta2_from_x',
    'force_ratio',
    'activation_force',
    'activation_work',
    'CollisionScenario',
    'kinetic_energy',
    'min_activation_speed',
    'collision_outcome',
    'lowpass',
    'peak_align',
    'work_done',
    'compare_dataset',
    'load_trace',
    'DesignPoint',
    'ScaleLaw',
    'sweep',
    'search',
    'scale_predict',
    'ModelConfig',
    'load_config',
]
