'''CSV, JSON and SVG emission.

Every file is written to a temporary sibling first and moved in place, so
readers never see a partial file. Floats are printed with a fixed format
and repeated runs produce identical bytes.
'''
import csv
import io
import json
import logging
import math
import os
import tempfile

import numpy as np

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.6f'
SVG_SIZE = (640, 400)
SVG_MARGIN = 40
SVG_COLORS = ('#000000', '#d62728', '#1f77b4', '#2ca02c', '#9467bd', '#ff7f0e')


def atomic_write(path, text):
    '''Write text to path through a temporary file and os.replace.
    '''
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(dir=directory, prefix='.%s.' % os.path.basename(path))
    try:
        with os.fdopen(fd, 'w', newline='') as f:
            f.write(text)
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.unlink(temp_path)
        raise
    logger.debug('wrote %s', path)


def format_value(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    return str(value)


def csv_text(header, rows, comments=()):
    buffer = io.StringIO()
    for comment in comments:
        buffer.write('# %s\n' % comment)
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def write_csv(path, header, rows, comments=()):
    atomic_write(path, csv_text(header, rows, comments))


def _plain(value):
    # numpy scalars and arrays are not JSON serializable
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError('cannot serialize %r' % (value,))


def json_text(report):
    return json.dumps(report, sort_keys=True, indent=2, default=_plain) + '\n'


def write_json(path, report):
    atomic_write(path, json_text(report))


def svg_text(series, size=SVG_SIZE):
    '''Axis lines and one polyline per (x, y) series, on shared axes.

    Non finite samples split a series into several polylines.
    '''
    width, height = size
    series = [(np.asarray(x, dtype=float), np.asarray(y, dtype=float)) for x, y in series]
    masks = [np.isfinite(x) & np.isfinite(y) for x, y in series]
    xs = np.concatenate([x[m] for (x, _), m in zip(series, masks)] + [np.empty(0)])
    ys = np.concatenate([y[m] for (_, y), m in zip(series, masks)] + [np.empty(0)])
    if xs.size == 0:
        xs = ys = np.zeros(1)
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def project(u, v):
        px = SVG_MARGIN + (u - x_lo) / (x_hi - x_lo) * (width - 2 * SVG_MARGIN)
        py = height - SVG_MARGIN - (v - y_lo) / (y_hi - y_lo) * (height - 2 * SVG_MARGIN)
        return '%.2f,%.2f' % (px, py)

    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d">' % (width, height),
        '<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="#808080"/>' % (
            SVG_MARGIN, height - SVG_MARGIN, width - SVG_MARGIN, height - SVG_MARGIN),
        '<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="#808080"/>' % (
            SVG_MARGIN, SVG_MARGIN, SVG_MARGIN, height - SVG_MARGIN),
    ]
    for i, (x, y) in enumerate(series):
        color = SVG_COLORS[i % len(SVG_COLORS)]
        points = []
        for u, v in zip(x, y):
            if math.isfinite(u) and math.isfinite(v):
                points.append(project(u, v))
                continue
            if points:
                lines.append(_polyline(points, color))
            points = []
        if points:
            lines.append(_polyline(points, color))
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'


def _polyline(points, color):
    return '<polyline fill="none" stroke="%s" points="%s"/>' % (color, ' '.join(points))


def write_svg(path, series):
    atomic_write(path, svg_text(series))


def grouped_series(rows, x_column, y_column, group_column):
    '''Split table rows into one (x, y) series per value of group_column.
    '''
    rows = np.asarray(rows, dtype=float)
    series = []
    for group in sorted(set(rows[:, group_column])):
        selected = rows[rows[:, group_column] == group]
        series.append((selected[:, x_column], selected[:, y_column]))
    return series
