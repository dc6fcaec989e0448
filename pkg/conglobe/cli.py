'''conglobe, the foldable airframe model on the command line
'''

import argparse
import logging
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from conglobe import collide, design, figures, linkage, measure, trigger
from conglobe.config import CONFIG_ENV, CONFIG_KEYS, load_config
from conglobe.exceptions import ConfigError, ConglobeError

KINEMATICS_HEADER = ('theta2_deg', 'theta1_deg', 'theta3_deg')
MOTOR_HEADER = ('theta2_deg', 'theta1_deg', 'z_mm')
TRIGGER_HEADER = ('theta2_deg', 'theta1_deg', 'theta3_deg', 'psi_deg', 'x_mm')
FORCE_HEADER = ('theta2_deg', 'psi_deg', 'force_ratio')
COLLIDE_HEADER = ('speed_m_s', 'kinetic_mJ', 'margin_mJ', 'activates')
DEFAULT_YAWS = (-30.0, 0.0, 30.0)


@dataclass(frozen=True)
class RunConfig:
    '''Invocation settings shared by every subcommand.
    '''
    command: str
    config_path: str = None
    output: str = None
    trace_dir: str = None
    cutoff: float = measure.CUTOFF_HZ
    workers: int = None

    def __post_init__(self):
        if self.config_path is not None and not os.path.isfile(self.config_path):
            raise ConfigError('model file %s does not exist' % self.config_path)
        if self.trace_dir is not None and not os.path.isdir(self.trace_dir):
            raise ConfigError('trace directory %s does not exist' % self.trace_dir)
        if not self.cutoff > 0:
            raise ConfigError('cutoff must be positive, got %r' % self.cutoff)
        if self.workers is not None and self.workers < 1:
            raise ConfigError('workers must be >= 1, got %r' % self.workers)


def span(text):
    '''Parse `lo:hi:step` into a (lo, hi, n) sampling.
    '''
    try:
        lo, hi, step = (float(v) for v in text.split(':'))
    except ValueError:
        raise argparse.ArgumentTypeError('expected lo:hi:step, got %r' % text)
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError('expected lo <= hi and step > 0, got %r' % text)
    return lo, hi, max(2, int(round((hi - lo) / step)) + 1)


def anchor(text):
    try:
        theta2, theta1 = (float(v) for v in text.split(':'))
    except ValueError:
        raise argparse.ArgumentTypeError('expected theta2:theta1, got %r' % text)
    return theta2, theta1


def work_source(text):
    if text == 'model':
        return None
    kind, _, value = text.partition(':')
    try:
        if kind == 'value':
            return float(value)
    except ValueError:
        pass
    raise argparse.ArgumentTypeError('expected model or value:<mJ>, got %r' % text)


def sweep_param(text):
    '''Parse `key=lo:hi:step` with key among the design point keys.
    '''
    key, _, grid = text.partition('=')
    names = {v: k for k, v in design.POINT_KEYS.items()}
    if key not in names:
        raise argparse.ArgumentTypeError('unknown sweep key %r (one of %s)' % (
            key, ', '.join(names)))
    try:
        lo, hi, step = (float(v) for v in grid.split(':'))
        return names[key], design.grid_values(lo, hi, step)
    except (ValueError, ConglobeError):
        raise argparse.ArgumentTypeError('expected %s=lo:hi:step, got %r' % (key, text))


def overrides(pairs):
    mapping = {}
    for pair in pairs or ():
        key, sep, value = pair.partition('=')
        if not sep:
            raise ConfigError('expected key=value, got %r' % pair)
        mapping[key.strip()] = value.strip()
    return mapping


def info(message, *args):
    print('[i] ' + message % args)


def warn(message, *args):
    print('[!] ' + message % args)


def emit_json(path, report):
    if path is None:
        sys.stdout.write(figures.json_text(report))
    else:
        figures.write_json(path, report)
        info('Report written to %s', path)


def cmd_calibrate(args, model, run):
    limits = {
        'theta2_max': model.linkage.theta2_max,
        'theta1_fold_limit': model.linkage.theta1_fold_limit,
        'theta1_branch': model.linkage.theta1_branch,
    }
    geom = linkage.calibrate(args.anchors or linkage.DEFAULT_ANCHORS, limits=limits,
        a12=model.linkage.a12)
    info('Calibrated a34 = %.6f deg, delta1 = %.6f deg', geom.a34, geom.joint_offsets[0])
    for theta2, theta1 in args.anchors or linkage.DEFAULT_ANCHORS:
        info('theta1(%.3f) = %.6f deg (anchor %.6f)', theta2,
            linkage.solve_arm(geom, theta2).theta1, theta1)
    calibrated = replace(model, linkage=geom)
    if run.output is not None:
        figures.atomic_write(run.output, calibrated.to_text())
        info('Model written to %s', run.output)


def cmd_kinematics(args, model, run):
    lo, hi, n = args.range
    geom = model.linkage
    folded = linkage.fold_state(geom)
    info('Fold state: theta2 = %.6f deg at theta1 = %.6f deg', folded.theta2, folded.theta1)
    if args.motor:
        rows = linkage.motor_path(geom, model.robot, lo, hi, n)
        figures.write_csv(run.output, MOTOR_HEADER, rows)
    else:
        rows = linkage.joint_curve(geom, lo, hi, n)
        figures.write_csv(run.output, KINEMATICS_HEADER, rows)
    info('theta1 minimum %.6f deg at theta2 = %.6f deg', rows[:, 1].min(),
        rows[int(np.argmin(rows[:, 1])), 0])
    info('Joint curve written to %s', run.output)


def cmd_trigger(args, model, run):
    lo, hi, n = args.range
    rows = trigger.trigger_curve(model.trigger, model.linkage, lo, hi, n, args.psi)
    for psi in args.psi:
        info('psi = %.1f deg: stroke to the flip point %.6f mm', psi,
            trigger.stroke(model.trigger, model.linkage.theta2_max, psi))
    figures.write_csv(run.output, TRIGGER_HEADER, rows)
    info('Trigger curves written to %s', run.output)


def cmd_force(args, model, run):
    lo, hi, n = args.range
    rows = trigger.force_curve(model.trigger, model.linkage, model.robot, lo, hi, n, args.psi)
    figures.write_csv(run.output, FORCE_HEADER, rows)
    for psi in args.psi:
        info('psi = %.1f deg: activation force %.6f N', psi,
            trigger.activation_force(model.trigger, model.linkage, model.robot, psi))
    info('Force ratio written to %s', run.output)


def cmd_work(args, model, run):
    reports = [
        trigger.activation_summary(model.trigger, model.linkage, model.robot, psi)
        for psi in args.psi
    ]
    emit_json(run.output, {'activation': reports, 'thrust_N': model.robot.thrust_total})


def cmd_collide(args, model, run):
    scenario = collide.CollisionScenario(args.speed, args.psi, args.efficiency,
        args.work_source)
    outcome = collide.collision_outcome(scenario, model.trigger, model.linkage, model.robot)
    report = outcome.as_report()
    report['min_activation_speed_m_s'] = collide.min_activation_speed(
        model.robot.mass, outcome.required_work, scenario.efficiency)
    emit_json(run.output, report)


def cmd_ingest(args, model, run):
    info('Searching directory %s ...', run.trace_dir)
    traces = measure.search_traces(run.trace_dir)
    info('Found %d force traces', len(traces))
    report = measure.compare_dataset(traces, model.trigger, model.linkage, model.robot,
        run.cutoff, run.workers)
    measure.write_report(run.output, report)
    for row in report:
        if row.flagged:
            warn('psi = %.1f deg deviates %.1f%% from the model', row.psi, row.deviation * 100.0)
    info('Comparison written to %s', run.output)


def _design_base(model):
    return design.DesignPoint(
        r=model.trigger.r, h=model.trigger.h, l=model.trigger.l,
        d=model.robot.d, gamma=model.robot.gamma, theta2_max=model.linkage.theta2_max,
        thrust=model.robot.thrust_total, mass=model.robot.mass
    )


def cmd_sweep(args, model, run):
    ranges = dict(args.param or ())
    base = _design_base(model)
    if args.objective is not None:
        constraints = {}
        if args.min_force_ratio is not None:
            constraints['min_force_ratio'] = args.min_force_ratio
        result = design.search(base, ranges, args.objective, constraints, run.workers)
        emit_json(run.output, result.as_report())
        return
    output = run.output or 'sweep.csv'
    rows = design.sweep(base, ranges, run.workers)
    figures.write_csv(output, design.SWEEP_HEADER, [row.as_row() for row in rows])
    failed = sum(1 for row in rows if row.error)
    if failed:
        warn('%d of %d design points failed', failed, len(rows))
    info('Sweep of %d design points written to %s', len(rows), output)


def cmd_scale(args, model, run):
    base = _design_base(model)
    metrics = design.evaluate(base)
    predicted = design.scale_predict(metrics, args.factor)
    recomputed = design.scale_recompute(base, args.factor)
    emit_json(run.output, {
        'factor': args.factor,
        'thrust_exponent': 3,
        'base': metrics.as_report(),
        'predicted': predicted.as_report(),
        'recomputed': recomputed.as_report(),
    })


def cmd_report(args, model, run):
    out = run.output
    os.makedirs(out, exist_ok=True)
    geom, trig, robot = model.linkage, model.trigger, model.robot
    outputs = []

    def emit(name, header, rows, x_column, y_columns, group=None):
        path = os.path.join(out, name + '.csv')
        figures.write_csv(path, header, rows)
        outputs.append(path)
        if not args.figures:
            return
        table = np.asarray(rows, dtype=float)
        if group is None:
            series = [(table[:, x_column], table[:, c]) for c in y_columns]
        else:
            series = figures.grouped_series(table, x_column, y_columns[0], group)
        svg = os.path.join(out, name + '.svg')
        figures.write_svg(svg, series)
        outputs.append(svg)

    info('Joint kinematics ...')
    emit('kinematics', KINEMATICS_HEADER, linkage.joint_curve(geom, 85.0, geom.theta2_max, 101),
        0, (1, 2))
    info('Trigger curves ...')
    emit('trigger', TRIGGER_HEADER,
        trigger.trigger_curve(trig, geom, 90.0, geom.theta2_max, 81, DEFAULT_YAWS), 4, (0,), 3)
    info('Force ratio ...')
    emit('force', FORCE_HEADER,
        trigger.force_curve(trig, geom, robot, 90.5, geom.theta2_max, 40, DEFAULT_YAWS), 0, (2,), 1)

    info('Synthetic bench dataset ...')
    traces = []
    yaws = (measure.COVERAGE_YAWS[0], measure.COVERAGE_YAWS[1], args.yaw_step)
    for psi, repeat in measure.coverage_plan(yaws, args.repeats):
        traces.append(measure.synthesize_trace(trig, geom, robot, psi, noise=args.noise,
            seed=repeat))
    dataset = measure.compare_dataset(traces, trig, geom, robot, run.cutoff, run.workers)
    emit('dataset', measure.REPORT_HEADER, [row.as_row() for row in dataset], 0, (1, 3))

    info('Collision threshold ...')
    emit('collide', COLLIDE_HEADER,
        collide.collision_sweep(np.linspace(0.0, 0.5, 51), trig, geom, robot), 0, (2,))

    info('Activation summary ...')
    summaries = []
    for psi in sorted({row.psi for row in dataset}):
        summaries.append(trigger.activation_summary(trig, geom, robot, psi))
    path = os.path.join(out, 'work.json')
    figures.write_json(path, {'activation': summaries, 'thrust_N': robot.thrust_total,
        'config': model.to_mapping()})
    outputs.append(path)
    for path in outputs:
        info('Wrote %s', path)


COMMANDS = {
    'calibrate': cmd_calibrate,
    'kinematics': cmd_kinematics,
    'trigger': cmd_trigger,
    'force': cmd_force,
    'work': cmd_work,
    'collide': cmd_collide,
    'ingest': cmd_ingest,
    'sweep': cmd_sweep,
    'scale': cmd_scale,
    'report': cmd_report,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog='conglobe',
        description='Collision-triggered foldable quadrotor airframe model',
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    parser.add_argument(
        '-c', '--config',
        dest='config',
        default=None,
        help='Model file (key = value); defaults to $CONGLOBE_CONFIG. Keys: %s'
            % ', '.join(CONFIG_KEYS)
    )
    parser.add_argument(
        '-s', '--set',
        dest='overrides',
        action='append',
        metavar='KEY=VALUE',
        help='Override one model file key'
    )
    parser.add_argument(
        '-v', '--verbose',
        action='store_true',
        help='Enable debug logging'
    )
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    def subcommand(name, help, output=None):
        sub = commands.add_parser(name, help=help,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        sub.add_argument('-o', '--output', dest='output', default=output,
            help='Output file' if output is None or '.' in output else 'Output directory')
        return sub

    def yaws(sub):
        sub.add_argument('--psi', type=float, action='append', default=None,
            help='Yaw angle in deg, repeatable (default: -30, 0, 30)')

    sub = subcommand('calibrate', 'Fit the loop geometry on (theta2, theta1) anchors')
    sub.add_argument('--anchor', dest='anchors', type=anchor, action='append',
        metavar='THETA2:THETA1', help='Calibration anchor in deg, give two (default: 90:10, 110:10.643)')

    sub = subcommand('kinematics', 'Joint curve theta1, theta3 over theta2', 'kinematics.csv')
    sub.add_argument('--range', type=span, default=(85.0, 110.0, 101),
        metavar='LO:HI:STEP', help='theta2 sweep in deg')
    sub.add_argument('--motor', action='store_true', help='Emit the motor height path instead')

    sub = subcommand('trigger', 'Wall displacement along the fold', 'trigger.csv')
    sub.add_argument('--range', type=span, default=(90.0, 110.0, 81),
        metavar='LO:HI:STEP', help='theta2 sweep in deg')
    yaws(sub)

    sub = subcommand('force', 'Force ratio F/T along the fold', 'force.csv')
    sub.add_argument('--range', type=span, default=(90.5, 110.0, 40),
        metavar='LO:HI:STEP', help='theta2 sweep in deg, above the flip point')
    yaws(sub)

    sub = subcommand('work', 'Activation force and work report (JSON)')
    yaws(sub)

    sub = subcommand('collide', 'Predict whether a wall collision folds the airframe (JSON)')
    sub.add_argument('--speed', type=float, required=True, help='Impact speed in m/s')
    sub.add_argument('--psi', type=float, default=0.0, help='Yaw at impact in deg')
    sub.add_argument('--work-source', dest='work_source', type=work_source, default=None,
        metavar='{model|value:<mJ>}', help='Required work: model prediction or a value in mJ')
    sub.add_argument('--efficiency', type=float, default=1.0,
        help='Share of kinetic energy taken up as fold work')

    sub = subcommand('ingest', 'Compare bench traces with the model', 'comparison.csv')
    sub.add_argument('trace_dir', help='Directory searched for trace CSV files')
    sub.add_argument('--cutoff', type=float, default=measure.CUTOFF_HZ, help='Low-pass cutoff in Hz')
    sub.add_argument('--report', dest='output', help='Alias of --output')
    sub.add_argument('-j', '--workers', type=int, default=None, help='Worker threads')

    sub = subcommand('sweep', 'Design space sweep (CSV, default sweep.csv) or search (JSON)')
    sub.add_argument('--param', type=sweep_param, action='append', metavar='KEY=LO:HI:STEP',
        help='Swept design key, repeatable: %s' % ', '.join(design.POINT_KEYS.values()))
    sub.add_argument('--objective', choices=design.OBJECTIVES, default=None,
        help='Search the grid for this objective instead of writing it')
    sub.add_argument('--min-force-ratio', dest='min_force_ratio', type=float, default=None,
        help='Search constraint: activation force >= k T')
    sub.add_argument('-j', '--workers', type=int, default=None, help='Worker threads')

    sub = subcommand('scale', 'Scaling law prediction against recomputation (JSON)')
    sub.add_argument('--factor', type=float, default=2.0, help='Length scale factor s')

    sub = subcommand('report', 'Every figure data set into one directory', 'conglobe-report')
    sub.add_argument('--figures', action='store_true', help='Also emit SVG polylines')
    sub.add_argument('--repeats', type=int, default=1, help='Synthetic traces per yaw')
    sub.add_argument('--yaw-step', dest='yaw_step', type=float, default=measure.COVERAGE_YAWS[2],
        help='Yaw step of the synthetic dataset in deg')
    sub.add_argument('--noise', type=float, default=0.05,
        help='Synthetic trace noise relative to the peak force')
    sub.add_argument('--cutoff', type=float, default=measure.CUTOFF_HZ, help='Low-pass cutoff in Hz')
    sub.add_argument('-j', '--workers', type=int, default=None, help='Worker threads')
    return parser


def run(argv=None):
    '''Run one invocation, returning its exit code.
    '''
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        return stop.code
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, format='%(levelname)s %(name)s: %(message)s')
    if getattr(args, 'psi', 0.0) is None:
        args.psi = list(DEFAULT_YAWS)
    try:
        run_config = RunConfig(
            args.command,
            args.config or os.environ.get(CONFIG_ENV) or None,
            args.output,
            getattr(args, 'trace_dir', None),
            getattr(args, 'cutoff', measure.CUTOFF_HZ),
            getattr(args, 'workers', None)
        )
        model = load_config(run_config.config_path)
        if args.overrides:
            model = model.with_overrides(overrides(args.overrides))
        COMMANDS[args.command](args, model, run_config)
    except (ConglobeError, OSError) as err:
        sys.stderr.write('error: %s: %s\n' % (type(err).__name__, err))
        return 1
    return 0


def cli_main():
    sys.exit(run())
