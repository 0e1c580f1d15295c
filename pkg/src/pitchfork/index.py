"""Topological index of planar fields on boxes.

Two independent routes to the same integer: summing ``sign(det J)`` over
the zeros found inside a box, and the winding number of the field along
the box boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .equilibria import find_equilibria
from .fields import Box, Model
from .stability import DET_ZERO

__all__ = [
    "IndexReport",
    "InwardCheck",
    "boundary_inward_check",
    "ph_index_sum",
    "verify_ph",
    "winding_degree",
]

MIN_BOUNDARY_SPEED = 1e-9
MAX_SEGMENTS = 2 ** 16


def _require_planar(model: Model, box: Box) -> None:
    if model.dim != 2 or box.dim != 2:
        raise ValueError("index computations need a 2D model and a 2D box")


@dataclass(frozen=True)
class InwardCheck:
    passed: bool
    violations: tuple[tuple[float, float], ...] = ()

    def __bool__(self):
        return self.passed


def _boundary_samples(box: Box, per_edge: int):
    (x0, y0), (x1, y1) = box.lower, box.upper
    xs = np.linspace(x0, x1, per_edge)
    ys = np.linspace(y0, y1, per_edge)
    # (point, required sign of dx/dt or None, required sign of dy/dt or None)
    for i, x in enumerate(xs):
        sx = 1 if i == 0 else (-1 if i == per_edge - 1 else None)
        yield (float(x), y0), sx, 1
        yield (float(x), y1), sx, -1
    for y in ys[1:-1]:
        yield (x0, float(y)), 1, None
        yield (x1, float(y)), -1, None


def boundary_inward_check(model: Model, box: Box, samples_per_edge: int = 64) -> InwardCheck:
    """Does the field point strictly into ``box`` at every sampled boundary point?

    At a corner both adjacent face conditions must hold; a zero inward
    component counts as a violation.
    """
    _require_planar(model, box)
    if samples_per_edge < 16:
        raise ValueError("samples_per_edge must be >= 16")
    bad = []
    for pt, need_x, need_y in _boundary_samples(box, samples_per_edge):
        fx, fy = model.rhs(pt)
        ok = (need_x is None or need_x * fx > 0) and (need_y is None or need_y * fy > 0)
        if not ok:
            bad.append(pt)
    return InwardCheck(not bad, tuple(bad))


def ph_index_sum(model: Model, box: Box, grid_per_axis: int = 25, tol: float = 1e-10) -> int | None:
    """Sum of ``sign(det J)`` over the equilibria inside ``box``.

    ``None`` when any enclosed equilibrium is degenerate.
    """
    _require_planar(model, box)
    total = 0
    for eq in find_equilibria(model, box, grid_per_axis, tol):
        det = float(np.linalg.det(model.jacobian(eq.location)))
        if eq.degenerate or abs(det) <= DET_ZERO:
            return None
        total += 1 if det > 0 else -1
    return total


def _perimeter_point(box: Box, s: float) -> tuple[float, float]:
    """Counter-clockwise boundary parametrisation, ``s`` in [0, 4)."""
    (x0, y0), (x1, y1) = box.lower, box.upper
    side, t = divmod(s, 1.0)
    side = int(side) % 4
    if side == 0:
        return (x0 + t * (x1 - x0), y0)
    if side == 1:
        return (x1, y0 + t * (y1 - y0))
    if side == 2:
        return (x1 - t * (x1 - x0), y1)
    return (x0, y1 - t * (y1 - y0))


def _wrap(angle: float) -> float:
    """Map into (-pi, pi]."""
    wrapped = math.remainder(angle, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def winding_degree(
    model: Model,
    box: Box,
    initial_samples_per_edge: int = 64,
    max_segments: int = MAX_SEGMENTS,
) -> int | None:
    """Brouwer degree of the field on ``box`` via its winding number.

    The boundary is walked counter-clockwise; any segment over which the
    field direction turns by more than a quarter turn is bisected.
    Returns ``None`` if the field (nearly) vanishes on the boundary or the
    refinement budget runs out.
    """
    _require_planar(model, box)

    def direction(s):
        fx, fy = model.rhs(_perimeter_point(box, s))
        if math.hypot(fx, fy) <= MIN_BOUNDARY_SPEED:
            raise _Vanishing
        return math.atan2(fy, fx)

    n0 = 4 * initial_samples_per_edge
    knots = [4.0 * i / n0 for i in range(n0)] + [4.0]
    try:
        angles = [direction(s) for s in knots]
    except _Vanishing:
        return None
    segments = len(knots) - 1
    total = 0.0
    stack = [(knots[i], angles[i], knots[i + 1], angles[i + 1]) for i in reversed(range(len(knots) - 1))]
    while stack:
        s0, th0, s1, th1 = stack.pop()
        delta = _wrap(th1 - th0)
        if abs(delta) > math.pi / 2:
            if segments >= max_segments:
                return None
            mid = 0.5 * (s0 + s1)
            try:
                th_mid = direction(mid)
            except _Vanishing:
                return None
            segments += 1
            stack.append((mid, th_mid, s1, th1))
            stack.append((s0, th0, mid, th_mid))
            continue
        total += delta
    turns = total / (2 * math.pi)
    nearest = round(turns)
    if abs(turns - nearest) >= 0.05:
        return None
    return int(nearest)


class _Vanishing(Exception):
    pass


@dataclass(frozen=True)
class IndexReport:
    box: Box
    inward: bool
    violations: tuple[tuple[float, float], ...]
    ph_sum: int | None
    winding: int | None
    notes: tuple[str, ...] = field(default=())

    @property
    def degenerate(self) -> bool:
        return self.ph_sum is None

    @property
    def agree(self) -> bool:
        return self.ph_sum is not None and self.winding is not None and self.ph_sum == self.winding

    @property
    def theorem_holds(self) -> bool | None:
        """Index sum equals ``(-1)^2 = 1`` on an inward box; ``None`` when not applicable."""
        if not self.inward or self.ph_sum is None:
            return None
        return self.ph_sum == 1

    @property
    def ok(self) -> bool:
        return self.agree and self.theorem_holds is not False

    def to_dict(self) -> dict:
        return {
            "box": list(self.box.flat()),
            "inward": "pass" if self.inward else "fail",
            "violations": len(self.violations),
            "ph_sum": self.ph_sum if self.ph_sum is not None else "undefined-degenerate",
            "winding": self.winding if self.winding is not None else "undefined",
            "agree": self.agree,
            "notes": list(self.notes),
        }


def verify_ph(
    model: Model,
    box: Box,
    samples_per_edge: int = 64,
    grid_per_axis: int = 25,
    tol: float = 1e-10,
) -> IndexReport:
    """Run the inwardness check, the index sum and the winding number on one box."""
    inward = boundary_inward_check(model, box, samples_per_edge)
    ph = ph_index_sum(model, box, grid_per_axis, tol)
    wind = winding_degree(model, box, samples_per_edge)
    notes = []
    if ph is None:
        notes.append("degenerate equilibrium inside box; index sum undefined")
    if wind is None:
        notes.append("field vanishes on (or too close to) the boundary; winding undefined")
    if ph is not None and wind is not None and ph != wind:
        notes.append(f"index sum {ph} disagrees with winding number {wind}")
    if inward.passed and ph is not None and ph != 1:
        notes.append(f"inward box but index sum {ph} != 1")
    return IndexReport(box, inward.passed, inward.violations, ph, wind, tuple(notes))
