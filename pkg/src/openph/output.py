"""
Serialization of experiment results: CSV tables (through pandas) and a small
standalone SVG line-plot emitter.
"""

import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from openph.helpers import require, require_count

PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22",
]


def _emit(text, sink):
    """Write `text` to a path or text stream (stdout when None); return bytes written."""
    if sink is None:
        sink = sys.stdout
    if isinstance(sink, (str, Path)):
        path = Path(sink)
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        logging.info(f"Wrote {path}")
    else:
        sink.write(text)
    return len(text.encode("utf-8"))


def format_csv(table, precision=12):
    """Header of comma-joined labels, then one LF-terminated line per row."""
    precision = require_count(precision, "precision", minimum=1, maximum=17)
    return table.to_frame().to_csv(
        index=False, float_format=f"%.{precision}g", lineterminator="\n"
    )


def write_csv(table, precision=12, sink=None):
    """
    Write a Table or TimeSeries as CSV.

    Args:
        table (Table): Data to write
        precision (int): Significant digits per value (default: 12)
        sink: Path, text stream, or None for stdout

    Returns:
        int: Bytes written
    """
    return _emit(format_csv(table, precision), sink)


def _fmt(value):
    return f"{value:.2f}"


class _SvgBuilder:
    def __init__(self):
        self.svg = ""

    def line(self, x1, y1, x2, y2, stroke="#000000", extra=""):
        self.svg += (
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}"{extra}/>\n'
        )

    def polyline(self, xs, ys, stroke, opacity, width):
        points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
        self.svg += (
            f'<polyline points="{points}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width}" stroke-opacity="{opacity}"/>\n'
        )

    def circle(self, cx, cy, r, fill, css_class):
        self.svg += (
            f'<circle class="{css_class}" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{r}" fill="{fill}"/>\n'
        )

    def text(self, x, y, string, anchor="start", extra=""):
        self.svg += (
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" text-anchor="{anchor}" '
            f'font-family="sans-serif" font-size="12"{extra}>{escape(str(string))}</text>\n'
        )

    def raw(self, content):
        self.svg += content


@dataclass
class SvgSeries:
    label: str
    x: np.ndarray
    y: np.ndarray
    color: str = None
    opacity: float = 1.0
    width: float = 1.5

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float).ravel()
        self.y = np.asarray(self.y, dtype=float).ravel()
        require(self.x.size == self.y.size and self.x.size >= 1, "series needs matching x and y")
        require(
            bool(np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))),
            f"series {self.label!r} has non-finite coordinates",
        )


@dataclass
class SvgPlot:
    """One line plot: axes auto-fitted to the data with a 5% margin."""

    series: list
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    width: int = 800
    height: int = 600
    markers: list = field(default_factory=list)
    marker_label: str = None

    MARGIN_LEFT = 80
    MARGIN_RIGHT = 30
    MARGIN_TOP = 40
    MARGIN_BOTTOM = 55

    def __post_init__(self):
        require(len(self.series) >= 1, "a plot needs at least one series")
        require_count(self.width, "width", minimum=200)
        require_count(self.height, "height", minimum=150)
        self.markers = [(float(x), float(y)) for x, y in self.markers]
        require(
            all(math.isfinite(x) and math.isfinite(y) for x, y in self.markers),
            "markers must be finite",
        )
        self._fit()

    def _fit(self):
        xs = [s.x for s in self.series] + [np.array([m[0] for m in self.markers])]
        ys = [s.y for s in self.series] + [np.array([m[1] for m in self.markers])]
        self.x_range = self._padded(np.concatenate(xs))
        self.y_range = self._padded(np.concatenate(ys))

    @staticmethod
    def _padded(values):
        lo, hi = float(values.min()), float(values.max())
        span = hi - lo
        if span == 0:
            span = abs(lo) if lo != 0 else 1.0
            lo, hi = lo - 0.5 * span, hi + 0.5 * span
            span = hi - lo
        return lo - 0.05 * span, hi + 0.05 * span

    def to_pixel(self, x, y):
        """Map data coordinates to SVG pixel coordinates (y axis pointing down)."""
        left, right = self.MARGIN_LEFT, self.width - self.MARGIN_RIGHT
        top, bottom = self.MARGIN_TOP, self.height - self.MARGIN_BOTTOM
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        px = left + (np.asarray(x, dtype=float) - x0) / (x1 - x0) * (right - left)
        py = bottom - (np.asarray(y, dtype=float) - y0) / (y1 - y0) * (bottom - top)
        return px, py

    def body(self):
        """SVG elements of the plot without the document wrapper."""
        svg = _SvgBuilder()
        left, right = self.MARGIN_LEFT, self.width - self.MARGIN_RIGHT
        top, bottom = self.MARGIN_TOP, self.height - self.MARGIN_BOTTOM
        svg.raw(f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="#ffffff"/>\n')
        svg.line(left, bottom, right, bottom)
        svg.line(left, top, left, bottom)

        for i in range(5):
            frac = i / 4
            xv = self.x_range[0] + frac * (self.x_range[1] - self.x_range[0])
            yv = self.y_range[0] + frac * (self.y_range[1] - self.y_range[0])
            px, _ = self.to_pixel(xv, self.y_range[0])
            _, py = self.to_pixel(self.x_range[0], yv)
            svg.line(px, bottom, px, bottom + 5)
            svg.text(px, bottom + 20, f"{xv:.3g}", anchor="middle")
            svg.line(left - 5, py, left, py)
            svg.text(left - 8, py + 4, f"{yv:.3g}", anchor="end")

        if self.title:
            svg.text(self.width / 2, top - 15, self.title, anchor="middle", extra=' font-weight="bold"')
        if self.x_label:
            svg.text((left + right) / 2, self.height - 12, self.x_label, anchor="middle")
        if self.y_label:
            svg.text(
                18, (top + bottom) / 2, self.y_label, anchor="middle",
                extra=f' transform="rotate(-90 18 {_fmt((top + bottom) / 2)})"',
            )

        for i, s in enumerate(self.series):
            px, py = self.to_pixel(s.x, s.y)
            svg.polyline(px, py, s.color or PALETTE[i % len(PALETTE)], s.opacity, s.width)

        for x, y in self.markers:
            px, py = self.to_pixel(x, y)
            svg.circle(float(px), float(py), 4, "#d62728", "node")

        legend = [(i, s) for i, s in enumerate(self.series) if s.label]
        if self.markers and self.marker_label:
            legend.append((None, None))
        svg.raw('<g class="legend">\n')
        for row, (i, s) in enumerate(legend):
            ly = top + 10 + 16 * row
            if s is None:
                svg.circle(right - 150, ly, 4, "#d62728", "legend-node")
                svg.text(right - 140, ly + 4, self.marker_label)
                continue
            svg.line(right - 160, ly, right - 140, ly,
                     stroke=s.color or PALETTE[i % len(PALETTE)], extra=' stroke-width="2"')
            svg.text(right - 135, ly + 4, s.label)
        svg.raw("</g>\n")
        return svg.svg


def _document(width, height, content):
    return (
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
        f'<svg version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" '
        'xmlns="http://www.w3.org/2000/svg">\n'
        f"{content}</svg>\n"
    )


def render_svg(plot):
    return _document(plot.width, plot.height, plot.body())


def render_svg_panels(plots, columns=2):
    """Several plots laid out row by row in one SVG document."""
    require(len(plots) >= 1, "at least one plot is required")
    columns = require_count(columns, "columns", minimum=1)
    cell_w = max(p.width for p in plots)
    cell_h = max(p.height for p in plots)
    columns = min(columns, len(plots))
    rows = math.ceil(len(plots) / columns)
    content = ""
    for i, plot in enumerate(plots):
        x, y = (i % columns) * cell_w, (i // columns) * cell_h
        content += (
            f'<svg x="{x}" y="{y}" width="{plot.width}" height="{plot.height}" '
            f'viewBox="0 0 {plot.width} {plot.height}">\n{plot.body()}</svg>\n'
        )
    return _document(columns * cell_w, rows * cell_h, content)


def write_svg(plot, sink=None):
    """Write one plot as a standalone SVG document; returns bytes written."""
    return _emit(render_svg(plot), sink)


def write_svg_panels(plots, sink=None, columns=2):
    """Write several plots in a grid as one SVG document; returns bytes written."""
    return _emit(render_svg_panels(plots, columns), sink)
