"""
Dependency-free SVG charts and CSV column reading.

Contains:
- read_csv_table / series_from_csvs: load one numeric column per run.
- line_chart_svg: one polyline per series with a legend.
- scatter_chart_svg: one circle per point.
"""

# 1. Standard library
import csv
import html
import math
from pathlib import Path

# 2. Local imports
from .exceptions import AnalysisError


WIDTH = 960
HEIGHT = 480
MARGIN = 60
TOP = 70
PALETTE = ['#2563eb', '#dc2626', '#16a34a', '#9333ea', '#ea580c', '#0891b2', '#4b5563', '#ca8a04']


def read_csv_table(path):
    """
    Returns:
        tuple: (column names, rows as dicts).

    Raises:
        AnalysisError: the file is missing or holds no data rows.
    """
    try:
        with open(path, newline='') as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
            columns = reader.fieldnames or []
    except FileNotFoundError as exc:
        raise AnalysisError(f'{path} does not exist') from exc
    if not rows:
        raise AnalysisError(f'{path} has no data rows')
    return list(columns), rows


def series_from_csvs(paths, column, x_column='step'):
    """
    One (name, xs, ys) series per CSV file; the name is the run directory.

    Raises:
        AnalysisError: empty file, differing schemas, or unknown column.
    """
    series, schema = [], None
    for path in paths:
        path = Path(path)
        columns, rows = read_csv_table(path)
        if schema is not None and columns != schema:
            raise AnalysisError(f'{path} does not share the schema of the other files')
        schema = columns
        if column not in columns:
            raise AnalysisError(f'unknown column {column!r}; available: {", ".join(columns)}')
        xs = [float(row[x_column]) for row in rows] if x_column in columns else list(range(len(rows)))
        ys = [float(row[column]) for row in rows]
        series.append((path.parent.name or path.stem, xs, ys))
    return series


def _finite_pairs(xs, ys):
    return [(x, y) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]


def _scale(value, low, high, out_low, out_high):
    if high == low:
        return (out_low + out_high) / 2.0
    return out_low + (value - low) / (high - low) * (out_high - out_low)


def _bounds(points):
    xs = [x for x, _ in points] or [0.0]
    ys = [y for _, y in points] or [0.0]
    return min(xs), max(xs), min(ys), max(ys)


def _frame(title, x_label, y_label, bounds):
    x_low, x_high, y_low, y_high = bounds
    left, right, bottom = MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'  <rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'  <text x="{left}" y="36" font-size="20" font-family="monospace">{html.escape(title)}</text>',
        f'  <line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="#334155" stroke-width="1"/>',
        f'  <line x1="{left}" y1="{TOP}" x2="{left}" y2="{bottom}" stroke="#334155" stroke-width="1"/>',
        f'  <text x="{right}" y="{HEIGHT - 20}" font-size="12" font-family="monospace" text-anchor="end">'
        f'{html.escape(x_label)} [{x_low:.4g}, {x_high:.4g}]</text>',
        f'  <text x="{left}" y="{TOP - 8}" font-size="12" font-family="monospace">'
        f'{html.escape(y_label)} [{y_low:.4g}, {y_high:.4g}]</text>',
    ]


def _to_canvas(point, bounds):
    x_low, x_high, y_low, y_high = bounds
    x = _scale(point[0], x_low, x_high, MARGIN, WIDTH - MARGIN)
    y = _scale(point[1], y_low, y_high, HEIGHT - MARGIN, TOP)
    return x, y


def line_chart_svg(title, series, x_label='step', y_label='value'):
    """
    Args:
        series (list[tuple[str, list, list]]): (name, xs, ys) per line.

    Raises:
        AnalysisError: no series has a finite point.
    """
    cleaned = [(name, _finite_pairs(xs, ys)) for name, xs, ys in series]
    bounds = _bounds([p for _, points in cleaned for p in points])
    if not any(points for _, points in cleaned):
        raise AnalysisError('nothing to plot: no finite values')
    lines = _frame(title, x_label, y_label, bounds)
    for i, (name, points) in enumerate(cleaned):
        color = PALETTE[i % len(PALETTE)]
        coords = ' '.join('{:.2f},{:.2f}'.format(*_to_canvas(p, bounds)) for p in points)
        lines.append(f'  <polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2">'
                     f'<title>{html.escape(name)}</title></polyline>')
        lines.append(f'  <text x="{WIDTH - MARGIN - 180}" y="{TOP + 16 * (i + 1)}" font-size="12" '
                     f'font-family="monospace" fill="{color}">{html.escape(name)}</text>')
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'


def scatter_chart_svg(title, xs, ys, x_label='x', y_label='y'):
    points = _finite_pairs(xs, ys)
    if not points:
        raise AnalysisError('nothing to plot: no finite values')
    bounds = _bounds(points)
    lines = _frame(title, x_label, y_label, bounds)
    for point in points:
        cx, cy = _to_canvas(point, bounds)
        lines.append(f'  <circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="{PALETTE[0]}" fill-opacity="0.7"/>')
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'


def write_svg(path, svg):
    Path(path).write_text(svg, encoding='utf-8')
    return Path(path)
