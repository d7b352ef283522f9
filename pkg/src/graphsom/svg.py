"""Minimal deterministic SVG emission (no plotting dependency)."""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22")


class Canvas:
    def __init__(self, width: int, height: int, title: str = ""):
        self.width, self.height = width, height
        self.parts: list[str] = []
        if title:
            self.text(width / 2, 18, title, size=14, anchor="middle")

    def line(self, x1, y1, x2, y2, stroke="#000", width=1.0, opacity=1.0):
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{stroke}" stroke-width="{width:.2f}" stroke-opacity="{opacity:.3f}"/>'
        )

    def polyline(self, xs, ys, stroke="#000", width=1.0, opacity=1.0):
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width:.2f}" stroke-opacity="{opacity:.3f}"/>'
        )

    def circle(self, x, y, r=2.5, fill="#000"):
        self.parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r:.2f}" fill="{fill}"/>')

    def rect(self, x, y, w, h, fill, stroke="none"):
        self.parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
            f'fill="{fill}" stroke="{stroke}"/>'
        )

    def text(self, x, y, s, size=11, anchor="start", fill="#000"):
        self.parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}" fill="{fill}">{escape(str(s))}</text>'
        )

    def render(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="#fff"/>\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def gray(level: float) -> str:
    """Hex gray, 0 -> black, 1 -> white."""
    v = int(round(255 * min(max(level, 0.0), 1.0)))
    return f"#{v:02x}{v:02x}{v:02x}"


class _Axes:
    def __init__(self, canvas: Canvas, xlim, ylim, margin=(60, 30, 40, 50)):
        self.c = canvas
        self.left, self.top, self.right, self.bottom = margin
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1
        if self.y1 == self.y0:
            self.y0, self.y1 = self.y0 - 0.5, self.y1 + 0.5

    def px(self, x):
        w = self.c.width - self.left - self.right
        return self.left + (np.asarray(x, float) - self.x0) / (self.x1 - self.x0) * w

    def py(self, y):
        h = self.c.height - self.top - self.bottom
        return self.c.height - self.bottom - (np.asarray(y, float) - self.y0) / (self.y1 - self.y0) * h

    def frame(self, xlabel="", ylabel="", xticks=(), yticks=()):
        c = self.c
        xb, yb = self.c.height - self.bottom, self.left
        c.line(yb, xb, c.width - self.right, xb)
        c.line(yb, self.top, yb, xb)
        for t in xticks:
            c.line(self.px(t), xb, self.px(t), xb + 4)
            c.text(self.px(t), xb + 16, _tick(t), size=10, anchor="middle")
        for t in yticks:
            c.line(yb - 4, self.py(t), yb, self.py(t))
            c.text(yb - 6, self.py(t) + 3, _tick(t), size=10, anchor="end")
        if xlabel:
            c.text((yb + c.width - self.right) / 2, c.height - 8, xlabel, anchor="middle")
        if ylabel:
            c.text(12, self.top - 8, ylabel)


def _tick(v) -> str:
    return f"{v:.6g}"


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / n))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (step * m) <= n:
            step *= m
            break
    first = math.ceil(lo / step) * step
    return [round(first + i * step, 10) for i in range(int((hi - first) / step) + 1)]


def line_plot(xs, ys, title="", xlabel="", ylabel="", width=560, height=360) -> str:
    c = Canvas(width, height, title)
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    ax = _Axes(c, (xs.min(), xs.max()), (min(0.0, ys.min()), ys.max()))
    ax.frame(xlabel, ylabel, _nice_ticks(xs.min(), xs.max()), _nice_ticks(ax.y0, ax.y1))
    c.polyline(ax.px(xs), ax.py(ys), stroke=PALETTE[0], width=1.5)
    for x, y in zip(ax.px(xs), ax.py(ys)):
        c.circle(x, y, 2.5, PALETTE[0])
    return c.render()


def profile_plot(
    lines: Sequence[Sequence[float]],
    feature_names: Sequence[str],
    title="",
    background: Sequence[Sequence[float]] = (),
    ylim=None,
    width=560,
    height=360,
) -> str:
    """Feature index on the x axis, value on the y axis, one line per vector.

    ``background`` lines are drawn first in light gray (class members).
    """
    c = Canvas(width, height, title)
    d = len(feature_names)
    fg = np.asarray(lines, float).reshape(-1, d)
    bg = np.asarray(background, float).reshape(-1, d)
    if ylim is None:
        both = np.vstack([fg, bg]) if bg.size else fg
        ylim = (float(both.min()), float(both.max())) if both.size else (0.0, 1.0)
    ax = _Axes(c, (1, d), ylim)
    xs = np.arange(1, d + 1)
    ax.frame("feature", "value", list(xs), _nice_ticks(ax.y0, ax.y1))
    for row in bg:
        c.polyline(ax.px(xs), ax.py(row), stroke="#999", width=0.6, opacity=0.35)
    for i, row in enumerate(fg):
        c.polyline(ax.px(xs), ax.py(row), stroke=PALETTE[i % len(PALETTE)], width=1.4)
    for j, name in enumerate(feature_names):
        c.text(ax.px(j + 1), c.height - 22, name, size=9, anchor="middle", fill="#555")
    return c.render()


def heatmap(
    values,
    positions,
    title="",
    cell=28,
    cell_labels: Sequence[str] | None = None,
    annotate: bool = False,
    note: str = "",
) -> str:
    """Gray-scale cells at integer (row, col) positions, black = lowest.

    A constant field is drawn uniform mid-gray and a legend note says so.
    """
    values = np.asarray(values, float)
    positions = np.asarray(positions, int)
    rows, cols = positions[:, 0].max() + 1, positions[:, 1].max() + 1
    margin_top, margin_left = 40, 20
    width = margin_left * 2 + cols * cell
    height = margin_top + rows * cell + 40
    c = Canvas(max(width, 220), height, title)
    finite = values[np.isfinite(values)]
    lo, hi = (finite.min(), finite.max()) if finite.size else (0.0, 0.0)
    constant = hi == lo
    for k, (r, col) in enumerate(positions):
        v = values[k]
        level = 0.5 if constant or not np.isfinite(v) else (v - lo) / (hi - lo)
        x, y = margin_left + col * cell, margin_top + r * cell
        c.rect(x, y, cell - 1, cell - 1, gray(level), stroke="#444")
        label = cell_labels[k] if cell_labels is not None else (f"{v:.2f}" if annotate else "")
        if label:
            c.text(x + cell / 2, y + cell / 2 + 3, label, size=8, anchor="middle",
                   fill="#000" if level > 0.5 else "#fff")
    legend_y = margin_top + rows * cell + 18
    if constant:
        c.text(margin_left, legend_y, f"constant value {lo:.6g}" + (f"; {note}" if note else ""), size=10)
    else:
        c.text(margin_left, legend_y, f"black={lo:.6g} white={hi:.6g}" + (f"; {note}" if note else ""), size=10)
    return c.render()


def matrix_heatmap(matrix, title="") -> str:
    """Square matrix as annotated gray cells; rows are origins."""
    m = np.asarray(matrix, float)
    positions = np.array([(i, j) for i in range(m.shape[0]) for j in range(m.shape[1])])
    labels = [f"{v:.1f}" for v in m.ravel()]
    return heatmap(m.ravel(), positions, title, cell=48, cell_labels=labels,
                   note="row = from, column = to")


def content_panels(panels, feature_names: Sequence[str], cls: int, panel=(150, 110)) -> str:
    """Small multiples, one panel per unit: member rows in gray under the
    unit's code-vector. ``panels`` holds ``(unit, code_vector, rows)``."""
    pw, ph = panel
    ncol = min(len(panels), 4) or 1
    nrow = (len(panels) + ncol - 1) // ncol
    c = Canvas(ncol * pw + 20, nrow * ph + 40, f"Macro-class {cls}: contents by unit")
    d = len(feature_names)
    stacks = [np.asarray(r, float).reshape(-1, d) for _, _, r in panels]
    allv = np.vstack([np.asarray([v for _, v, _ in panels]).reshape(-1, d), *stacks])
    lo, hi = float(allv.min()), float(allv.max())
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    for k, (unit, vec, rows) in enumerate(panels):
        x0 = 10 + (k % ncol) * pw
        y0 = 30 + (k // ncol) * ph
        c.rect(x0 + 2, y0 + 2, pw - 4, ph - 4, "#fafafa", stroke="#ccc")
        xs = x0 + 8 + np.arange(d) * (pw - 16) / max(d - 1, 1)

        def ys(vals):
            return y0 + ph - 8 - (np.asarray(vals) - lo) / (hi - lo) * (ph - 24)

        for row in stacks[k]:
            c.polyline(xs, ys(row), stroke="#999", width=0.5, opacity=0.3)
        c.polyline(xs, ys(vec), stroke=PALETTE[0], width=1.5)
        c.text(x0 + 6, y0 + 14, f"unit {unit} (n={len(stacks[k])})", size=9)
    return c.render()
