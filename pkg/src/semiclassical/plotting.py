"""
Static SVG line plots of trajectory CSV files.

Output is deterministic: fixed viewport, fixed number formatting, columns in
the order requested.
"""

import logging
from xml.sax.saxutils import escape

import numpy as np

from .constants import SVG_COLORS, SVG_HEIGHT, SVG_MARGIN, SVG_WIDTH
from .errors import ConfigError

logger = logging.getLogger(__name__)


def read_csv(path):
    """
    Read a trajectory CSV.

    Returns:
        tuple: (header list, 2-D float array)
    """
    try:
        with open(path, "r") as f:
            header = f.readline().strip().split(",")
    except OSError as e:
        raise ConfigError(f"Error reading {path}: {e}")
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as e:
        raise ConfigError(f"Error parsing {path}: {e}")
    if data.shape[1] != len(header):
        raise ConfigError(f"{path}: header has {len(header)} columns, rows have {data.shape[1]}")
    return header, data


def _range(values):
    low, high = float(np.min(values)), float(np.max(values))
    if high == low:
        pad = max(abs(low), 1.0) * 0.5
        return low - pad, high + pad
    return low, high


def _scale(values, low, high, start, length):
    return start + (values - low) / (high - low) * length


def render_svg(x, columns, x_label="t"):
    """
    SVG document with one polyline per column against a shared abscissa.

    Args:
        x (ndarray): Abscissa values
        columns (list): (name, ndarray) pairs, drawn in order; names may repeat
        x_label (str): Abscissa name

    Returns:
        str: The SVG text
    """
    width, height, margin = SVG_WIDTH, SVG_HEIGHT, SVG_MARGIN
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    x = np.asarray(x, dtype=float)
    x_low, x_high = _range(x)
    y_low, y_high = _range(np.concatenate([np.asarray(v, dtype=float) for _, v in columns]))

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{margin}" y="{height - margin + 20}" font-size="12">{x_low:.6g}</text>',
        f'<text x="{width - margin}" y="{height - margin + 20}" font-size="12" text-anchor="end">{x_high:.6g}</text>',
        f'<text x="{width // 2}" y="{height - margin + 40}" font-size="12" text-anchor="middle">{escape(x_label)}</text>',
        f'<text x="{margin - 5}" y="{height - margin}" font-size="12" text-anchor="end">{y_low:.6g}</text>',
        f'<text x="{margin - 5}" y="{margin + 12}" font-size="12" text-anchor="end">{y_high:.6g}</text>',
    ]
    px = _scale(x, x_low, x_high, margin, plot_w)
    for i, (name, values) in enumerate(columns):
        # SVG y grows downwards
        py = height - _scale(np.asarray(values, dtype=float), y_low, y_high, margin, plot_h)
        points = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px, py))
        color = SVG_COLORS[i % len(SVG_COLORS)]
        lines.append(f'<polyline fill="none" stroke="{color}" points="{points}"/>')
        lines.append(
            f'<text x="{width - margin + 5}" y="{margin + 14 * (i + 1)}" font-size="12" fill="{color}">{escape(name)}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def plot_csv(csv_path, cols, out_path, x_col="t"):
    """
    Plot CSV columns into an SVG file.

    Args:
        csv_path (str): Trajectory CSV
        cols (list): Column names
        out_path (str): SVG path
        x_col (str): Abscissa column
    """
    header, data = read_csv(csv_path)
    missing = [c for c in [x_col] + list(cols) if c not in header]
    if missing:
        raise ConfigError(f"{csv_path} has no column(s) {', '.join(missing)}")
    if not cols:
        raise ConfigError("no columns to plot")
    index = {name: i for i, name in enumerate(header)}
    columns = [(name, data[:, index[name]]) for name in cols]
    svg = render_svg(data[:, index[x_col]], columns, x_label=x_col)
    with open(out_path, "w") as f:
        f.write(svg)
    logger.info("Wrote %s (%d polylines, %d points)", out_path, len(columns), data.shape[0])
