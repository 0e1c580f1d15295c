"""Serialisation: CSV, JSON and hand-written SVG.

All emitters return ``bytes`` and are deterministic for identical input.
"""
from __future__ import annotations

import json
import math
from typing import Iterable, Sequence

SCHEMA_VERSION = 1

CLASS_COLORS = {
    "sink": "#1f77b4",
    "saddle": "#d62728",
    "source": "#ff7f0e",
    "degenerate": "#2ca02c",
    "nonhyperbolic-complex": "#9467bd",
}


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def emit_csv(header: Sequence[str], rows: Iterable[Sequence]) -> bytes:
    """Header plus one line per row; reals with 17 significant digits, LF endings."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return ("\n".join(lines) + "\n").encode("ascii")


def emit_json(payload: dict) -> bytes:
    body = {"schema_version": SCHEMA_VERSION, **payload}
    return (json.dumps(body, indent=2, allow_nan=False) + "\n").encode("ascii")


# --- SVG -----------------------------------------------------------------

WIDTH, HEIGHT = 800, 600
MARGIN = 60


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    """Round-number ticks covering ``[lo, hi]``."""
    span = hi - lo
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9)
    ticks = []
    k = first
    while k * step <= hi + 1e-9 * span:
        ticks.append(round(k * step, 12))
        k += 1
    return ticks


class _Canvas:
    def __init__(self, xlim, ylim, title=""):
        self.xlim = xlim
        self.ylim = ylim
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        ]
        if title:
            self.parts.append(
                f'<text x="{WIDTH / 2:.0f}" y="30" text-anchor="middle" font-family="sans-serif" '
                f'font-size="16">{_escape(title)}</text>'
            )

    def px(self, x: float, y: float) -> tuple[float, float]:
        (x0, x1), (y0, y1) = self.xlim, self.ylim
        sx = MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2 * MARGIN)
        sy = HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2 * MARGIN)
        return sx, sy

    def axes(self, xlabel: str, ylabel: str):
        left, bottom = MARGIN, HEIGHT - MARGIN
        right, top = WIDTH - MARGIN, MARGIN
        self.parts.append(
            f'<rect class="frame" x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
            'fill="none" stroke="black"/>'
        )
        for t in nice_ticks(*self.xlim):
            sx, _ = self.px(t, self.ylim[0])
            self.parts.append(f'<line x1="{sx:.2f}" y1="{bottom}" x2="{sx:.2f}" y2="{bottom + 5}" stroke="black"/>')
            self.parts.append(
                f'<text x="{sx:.2f}" y="{bottom + 20}" text-anchor="middle" font-family="sans-serif" '
                f'font-size="12">{_tick_label(t)}</text>'
            )
        for t in nice_ticks(*self.ylim):
            _, sy = self.px(self.xlim[0], t)
            self.parts.append(f'<line x1="{left - 5}" y1="{sy:.2f}" x2="{left}" y2="{sy:.2f}" stroke="black"/>')
            self.parts.append(
                f'<text x="{left - 8}" y="{sy + 4:.2f}" text-anchor="end" font-family="sans-serif" '
                f'font-size="12">{_tick_label(t)}</text>'
            )
        self.parts.append(
            f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="14">{_escape(xlabel)}</text>'
        )
        self.parts.append(
            f'<text x="18" y="{HEIGHT / 2:.0f}" text-anchor="middle" font-family="sans-serif" font-size="14" '
            f'transform="rotate(-90 18 {HEIGHT / 2:.0f})">{_escape(ylabel)}</text>'
        )

    def polyline(self, pts, css_class: str, color: str = "black"):
        coords = " ".join("%.2f,%.2f" % self.px(x, y) for x, y in pts)
        self.parts.append(
            f'<polyline class="{css_class}" points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )

    def marker(self, x, y, kind: str, r: float = 3.0):
        sx, sy = self.px(x, y)
        color = CLASS_COLORS.get(kind, "black")
        self.parts.append(f'<circle class="{kind}" cx="{sx:.2f}" cy="{sy:.2f}" r="{r}" fill="{color}"/>')

    def legend(self, kinds: Sequence[str]):
        x, y = WIDTH - MARGIN - 150, MARGIN + 15
        for i, kind in enumerate(kinds):
            yy = y + 18 * i
            self.parts.append(
                f'<circle class="legend" cx="{x}" cy="{yy}" r="4" fill="{CLASS_COLORS.get(kind, "black")}"/>'
            )
            self.parts.append(
                f'<text x="{x + 10}" y="{yy + 4}" font-family="sans-serif" font-size="12">{kind}</text>'
            )

    def render(self) -> bytes:
        return ("\n".join(self.parts + ["</svg>"]) + "\n").encode("utf-8")


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _tick_label(t: float) -> str:
    return ("%.6g" % t).replace("-", "−") if t != 0 else "0"


def _padded(lo: float, hi: float) -> tuple[float, float]:
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def emit_svg_diagram(branches, param_name: str, coord: int = 0, title: str = "") -> bytes:
    """Bifurcation diagram: one polyline per branch, one marker per equilibrium.

    ``coord`` picks the state coordinate plotted against the parameter.
    """
    xs = [p for b in branches for p in b.params] or [0.0, 1.0]
    ys = [pt[coord] for b in branches for pt in b.points] or [0.0, 1.0]
    canvas = _Canvas(_padded(min(xs), max(xs)), _padded(min(ys), max(ys)), title)
    canvas.axes(param_name, "xy"[coord] if coord < 2 else f"x{coord}")
    for b in branches:
        canvas.polyline([(p, pt[coord]) for p, pt in zip(b.params, b.points)], "branch")
    for b in branches:
        for p, pt, kind in zip(b.params, b.points, b.kinds):
            canvas.marker(p, pt[coord], kind, r=2.0)
    canvas.legend(sorted({k for b in branches for k in b.kinds}))
    return canvas.render()


def emit_svg_isoclines(x_iso, y_iso, equilibria, title: str = "") -> bytes:
    """The two isoclines as polylines, equilibria as circles coloured by class.

    ``equilibria`` is an iterable of ``(point, kind)`` pairs.
    """
    pts = [tuple(p) for p in x_iso] + [tuple(p) for p in y_iso]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    canvas = _Canvas(_padded(min(xs), max(xs)), _padded(min(ys), max(ys)), title)
    canvas.axes("x", "y")
    canvas.polyline(x_iso, "isocline", "#444444")
    canvas.polyline(y_iso, "isocline", "#888888")
    kinds = []
    for pt, kind in equilibria:
        canvas.marker(pt[0], pt[1], kind, r=5.0)
        kinds.append(kind)
    canvas.legend(sorted(set(kinds)))
    return canvas.render()
