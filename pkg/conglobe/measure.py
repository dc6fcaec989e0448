'''Benchtop force trace processing.

A trace records the force (N) a wall exerts on the fold trigger while it
advances at constant speed. Processing follows the bench procedure: low-pass
the force, put x = 0 at its maximum and integrate F dx (mJ) over an interval.
'''
import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import signal
from scipy.integrate import trapezoid

from .exceptions import ConglobeError, DoubleContact, EmptyTrace, \
    InvalidParameter, RangeOutsideTrace, RateTooLow, UnknownTraceFormat
from .figures import atomic_write, csv_text, write_csv
from .trigger import DOUBLE_CONTACT_RANGE, activation_force, activation_work, \
    force_profile
from .types import ForceTrace

logger = logging.getLogger(__name__)

CUTOFF_HZ = 50.0
FILTER_ORDER = 2
SAMPLE_RATE_HZ = 1000.0
WALL_SPEED = 0.25
# fraction of the model prediction beyond which a measurement is flagged
DEVIATION_THRESHOLD = 0.30
TRACE_HEADER = ('time_s', 'position_mm', 'force_N')
TRACE_EXTENSION = '.csv'
REPORT_HEADER = ('psi_deg', 'f_max_N', 'work_mJ', 'f_model_N', 'w_model_mJ',
    'deviation_pct', 'flagged')
# bench yaw schedule
COVERAGE_YAWS = (-35.0, 45.0, 5.0)
COVERAGE_REPEATS = 4
PROFILE_NODES = 201


def lowpass(trace, cutoff=CUTOFF_HZ):
    '''Zero-phase second order low-pass on the force channel.

    A Bessel prototype run forward and backward keeps the peak in place and
    does not overshoot on the contact step.
    '''
    if len(trace) < 2:
        raise EmptyTrace('at least two samples are needed to filter a trace')
    if trace.rate <= 2.0 * cutoff:
        raise RateTooLow(trace.rate, cutoff)
    b, a = signal.bessel(FILTER_ORDER, cutoff, btype='low', fs=trace.rate, norm='mag')
    padlen = min(3 * max(len(a), len(b)), len(trace) - 1)
    return trace.with_forces(signal.filtfilt(b, a, trace.forces, padlen=padlen))


def peak_align(trace):
    '''Maximum force and the trace shifted so that it sits at x = 0.
    '''
    if len(trace) == 0:
        raise EmptyTrace('trace holds no sample')
    peak = int(np.argmax(trace.forces))
    return float(trace.forces[peak]), trace.shifted(-trace.positions[peak])


def work_done(trace, x_lo=None, x_hi=0.0):
    '''Trapezoidal integral of F dx (mJ) over [x_lo, x_hi] mm.

    x_lo defaults to the first position, x_hi None means the last one.
    Bounds falling between samples are linearly interpolated.
    '''
    if len(trace) == 0:
        raise EmptyTrace('trace holds no sample')
    x = trace.positions
    f = trace.forces
    if x_lo is None:
        x_lo = float(x[0])
    if x_hi is None:
        x_hi = float(x[-1])
    if x_lo > x_hi:
        raise InvalidParameter('x_lo %.6f mm above x_hi %.6f mm' % (x_lo, x_hi))
    if x_lo < x[0] or x_hi > x[-1]:
        raise RangeOutsideTrace(x_lo, x_hi, float(x[0]), float(x[-1]))
    if x_lo == x_hi:
        return 0.0
    inside = (x > x_lo) & (x < x_hi)
    xs = np.concatenate(([x_lo], x[inside], [x_hi]))
    fs = np.concatenate(([np.interp(x_lo, x, f)], f[inside], [np.interp(x_hi, x, f)]))
    return float(trapezoid(fs, xs))


def synthesize_trace(trigger, linkage, params, psi=0.0, rate=SAMPLE_RATE_HZ,
        speed=WALL_SPEED, lead=0.25, tail=0.25, noise=0.0, seed=0):
    '''Model-generated bench trace for a wall advancing at speed mm/s.

    The wall touches the trigger after `lead` mm and the force follows the
    model F(x) down to the flip point, then drops to zero for `tail` mm.
    noise adds high-pass filtered uniform noise of that amplitude relative to
    the peak force. Positions are stage readings starting at 0.
    '''
    x_model, f_model = force_profile(trigger, linkage, params, psi, PROFILE_NODES)
    duration = (lead + x_model[-1] + tail) / speed
    times = np.arange(int(math.floor(duration * rate)) + 1) / rate
    positions = speed * times
    forces = np.interp(positions - lead, x_model, f_model, left=0.0, right=0.0)
    if noise > 0:
        rng = np.random.default_rng(seed)
        jitter = rng.uniform(-1.0, 1.0, len(times)) * noise * float(f_model.max())
        b, a = signal.bessel(4, rate / 4.0, btype='high', fs=rate, norm='mag')
        forces = forces + signal.filtfilt(b, a, jitter)
    return ForceTrace(times, positions, forces, psi, rate)


def load_trace(path):
    '''Read a trace CSV: `# psi_deg=` comment then time_s,position_mm,force_N.
    '''
    psi = None
    rows = []
    header = None
    try:
        with open(path, newline='') as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                if line.startswith('#'):
                    key, _, value = line[1:].partition('=')
                    if key.strip() == 'psi_deg':
                        psi = float(value)
                    continue
                fields = next(csv.reader([line]))
                if header is None:
                    header = tuple(field.strip() for field in fields)
                    if header != TRACE_HEADER:
                        raise UnknownTraceFormat('%s: unexpected header %r' % (path, header))
                    continue
                rows.append([float(field) for field in fields])
    except ValueError as oops:
        raise UnknownTraceFormat('%s: %s' % (path, oops)) from oops
    except UnicodeDecodeError as oops:
        raise UnknownTraceFormat('%s: not a text file' % path) from oops
    if header is None:
        raise UnknownTraceFormat('%s: missing header' % path)
    if psi is None:
        raise UnknownTraceFormat('%s: missing psi_deg comment' % path)
    if any(len(row) != 3 for row in rows):
        raise UnknownTraceFormat('%s: rows must hold three columns' % path)
    data = np.array(rows, dtype=float).reshape(-1, 3)
    return ForceTrace(data[:, 0], data[:, 1], data[:, 2], psi)


def trace_text(trace):
    rows = zip(trace.times, trace.positions, trace.forces)
    return csv_text(TRACE_HEADER, rows, comments=('psi_deg=%s' % trace.psi,))


def save_trace(trace, path):
    atomic_write(path, trace_text(trace))


def search_traces(search_path):
    '''Load every trace below search_path, skipping unreadable files.
    '''
    traces = []
    for root, dirs, files in os.walk(search_path, topdown=True):
        dirs.sort()
        for filename in sorted(files):
            if not filename.lower().endswith(TRACE_EXTENSION):
                continue
            filepath = os.path.join(root, filename)
            try:
                traces.append(load_trace(filepath))
                logger.debug('loaded trace %s', filepath)
            except (ConglobeError, OSError) as err:
                print('[!] Skipping %s: %s' % (filepath, err))
    return traces


def coverage_plan(yaws=COVERAGE_YAWS, repeats=COVERAGE_REPEATS):
    '''Bench schedule as (psi, repeat) pairs.

    Yaws in DOUBLE_CONTACT_RANGE, where two arms touch the wall, are left out.
    '''
    band_lo, band_hi = DOUBLE_CONTACT_RANGE
    lo, hi, step = yaws
    count = int(round((hi - lo) / step)) + 1
    plan = []
    for i in range(count):
        psi = lo + i * step
        if band_lo <= psi <= band_hi:
            continue
        plan.extend((psi, repeat) for repeat in range(repeats))
    return plan


@dataclass(frozen=True)
class Comparison:
    '''One trace against the model prediction at its yaw.
    '''
    psi: float
    f_max: float
    work: float
    f_model: float = None
    w_model: float = None

    @property
    def deviation(self):
        '''Largest relative gap of force or work to the model (signed).
        '''
        if self.f_model is None:
            return None
        gaps = (self.f_max / self.f_model - 1.0, self.work / self.w_model - 1.0)
        return max(gaps, key=abs)

    @property
    def flagged(self):
        if self.deviation is None:
            return False
        return round(abs(self.deviation) * 100.0, 1) >= DEVIATION_THRESHOLD * 100.0

    def as_row(self):
        deviation = None if self.deviation is None else self.deviation * 100.0
        return (self.psi, self.f_max, self.work, self.f_model, self.w_model,
            deviation, self.flagged)


def _process(trace, cutoff):
    f_max, aligned = peak_align(lowpass(trace, cutoff))
    return f_max, work_done(aligned, None, None)


def compare_dataset(traces, trigger, linkage, params, cutoff=CUTOFF_HZ, workers=None):
    '''Measured peak force and work of each trace against the model.

    The work of a trace covers its whole recorded stroke. Traces in the
    double contact band or outside the yaw range get no model values. Rows keep the input order.
    '''
    traces = list(traces)
    models = {}
    for psi in sorted({trace.psi for trace in traces}):
        try:
            models[psi] = (
                activation_force(trigger, linkage, params, psi),
                activation_work(trigger, linkage, params, psi).integral
            )
        except (DoubleContact, InvalidParameter) as err:
            logger.warning('%s, not compared', err)
            models[psi] = (None, None)

    with ThreadPoolExecutor(max_workers=workers) as executor:
        measured = list(executor.map(lambda t: _process(t, cutoff), traces))

    report = []
    for trace, (f_max, work) in zip(traces, measured):
        row = Comparison(trace.psi, f_max, work, *models[trace.psi])
        if row.flagged:
            logger.info('psi=%.1f deg deviates %.1f%% from the model', row.psi,
                row.deviation * 100.0)
        report.append(row)
    return report


def write_report(path, report):
    write_csv(path, REPORT_HEADER, [row.as_row() for row in report])
