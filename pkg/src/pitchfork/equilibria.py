"""Locating equilibria: closed form for the quadratic normal form, Newton otherwise."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .fields import Box, DomainError, Model, make_model

__all__ = [
    "DEDUP_RADIUS",
    "EquilibriumPoint",
    "NewtonFailure",
    "closed_form_equilibria",
    "find_equilibria",
    "newton_refine",
    "residual_norm",
]

DEDUP_RADIUS = 1e-6
LOOSE_RADIUS = 1e-4
SINGULAR_DET = 1e-14
DEGENERATE_DET = 1e-8
BOUNDARY_MARGIN = 1e-9


@dataclass(frozen=True)
class EquilibriumPoint:
    location: tuple[float, ...]
    residual: float
    source: str  # "closed-form" or "newton"
    degenerate: bool = False
    iterations: int = 0

    def __iter__(self):
        return iter(self.location)


class NewtonFailure(ArithmeticError):
    """Newton iteration did not produce a zero.

    ``reason`` is one of ``"singular"``, ``"no-convergence"``,
    ``"left-domain"``.
    """

    def __init__(self, reason: str, point: Sequence[float], iterations: int):
        super().__init__(f"newton failed ({reason}) after {iterations} iterations at {tuple(point)}")
        self.reason = reason
        self.point = tuple(point)
        self.iterations = iterations


def residual_norm(model: Model, x: Sequence[float]) -> float:
    return max(abs(float(c)) for c in model.rhs(tuple(x)))


def closed_form_equilibria(a: float) -> list[EquilibriumPoint]:
    """Real intersections of the two parabolic isoclines of the normal form.

    Returns the central point, the two flanking points (when the
    discriminant ``(a-1)(a+3)`` is nonnegative) and the far point
    ``(a+1, a+1)``.  Coincident roots are returned once and flagged
    ``degenerate``.
    """
    model = make_model("normal2d", {"a": a})
    half = 0.5 * (a - 1.0)
    disc = (a - 1.0) * (a + 3.0)
    candidates = [(0.0, 0.0)]
    if disc >= 0:
        s = 0.5 * math.sqrt(disc)
        candidates += [(half + s, half - s), (half - s, half + s)]
    candidates.append((a + 1.0, a + 1.0))

    merged: list[list] = []
    for pt in candidates:
        for group in merged:
            if max(abs(p - q) for p, q in zip(pt, group[0])) <= DEDUP_RADIUS:
                group[1] += 1
                break
        else:
            merged.append([pt, 1])
    return [
        EquilibriumPoint(pt, residual_norm(model, pt), "closed-form", degenerate=count > 1)
        for pt, count in merged
    ]


def _solve(jac, rhs):
    if len(jac) == 1:
        det = jac[0][0]
        return det, (None if det == 0 else (rhs[0] / det,))
    if len(jac) == 2:
        (p, q), (r, s) = jac
        det = p * s - q * r
        if det == 0:
            return det, None
        return det, ((s * rhs[0] - q * rhs[1]) / det, (p * rhs[1] - r * rhs[0]) / det)
    arr = np.array(jac, dtype=float)
    det = float(np.linalg.det(arr))
    if det == 0:
        return det, None
    return det, tuple(np.linalg.solve(arr, np.asarray(rhs, dtype=float)))


def newton_refine(
    model: Model,
    seed: Sequence[float],
    tol: float = 1e-12,
    max_iter: int = 50,
    bounds: Box | None = None,
    xtol: float = 1e-12,
) -> EquilibriumPoint:
    """Plain Newton iteration on the analytic Jacobian.

    Once the residual is below ``tol`` the iteration keeps polishing until
    the step falls below ``xtol * (1 + |x|)``.  Near a multiple root Newton
    only creeps, so a point with ``|det J| <= 1e-8`` is accepted as soon as
    the residual is small and comes back flagged ``degenerate``.  Raises
    :class:`NewtonFailure` on a singular Jacobian, on leaving ``bounds``, or
    when ``max_iter`` is exhausted.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = tuple(float(v) for v in seed)
    last_step = math.inf
    res = math.inf
    degenerate = False
    for it in range(max_iter + 1):
        try:
            f = model.rhs(x)
            jac = model.jac(x)
        except DomainError:
            raise NewtonFailure("left-domain", x, it) from None
        res = max(abs(c) for c in f)
        if not math.isfinite(res):
            raise NewtonFailure("left-domain", x, it)
        det, step = _solve(jac, f)
        degenerate = abs(det) <= DEGENERATE_DET
        if res <= tol:
            scale = 1.0 + max(abs(c) for c in x)
            if res == 0.0 or degenerate or last_step <= xtol * scale:
                return EquilibriumPoint(x, res, "newton", degenerate=degenerate, iterations=it)
        if it == max_iter:
            break
        if step is None or abs(det) < SINGULAR_DET:
            raise NewtonFailure("singular", x, it)
        x = tuple(xi - si for xi, si in zip(x, step))
        last_step = max(abs(s) for s in step)
        if bounds is not None and not bounds.contains(x):
            raise NewtonFailure("left-domain", x, it + 1)
    if res <= tol:
        return EquilibriumPoint(x, res, "newton", degenerate=degenerate, iterations=max_iter)
    raise NewtonFailure("no-convergence", x, max_iter)


def _grid_nodes(box: Box, per_axis: int):
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(box.lower, box.upper)]
    return itertools.product(*[[float(v) for v in ax] for ax in axes])


def dedupe(
    points: list[EquilibriumPoint],
    radius: float = DEDUP_RADIUS,
    loose_radius: float = LOOSE_RADIUS,
) -> list[EquilibriumPoint]:
    """Collapse points closer than ``radius`` (max-norm), keeping the smallest residual.

    Newton only creeps towards a multiple root, so when either point of a
    pair was flagged degenerate the pair merges within ``loose_radius``.
    """
    kept: list[EquilibriumPoint] = []
    for pt in sorted(points, key=lambda p: (p.residual, p.location)):
        for i, k in enumerate(kept):
            r = loose_radius if (pt.degenerate or k.degenerate) else radius
            if max(abs(a - b) for a, b in zip(pt.location, k.location)) <= r:
                if pt.degenerate and not k.degenerate:
                    kept[i] = replace(k, degenerate=True)
                break
        else:
            kept.append(pt)
    return sorted(kept, key=lambda p: p.location)


def find_equilibria(
    model: Model,
    box: Box,
    grid_per_axis: int = 25,
    tol: float = 1e-10,
    dedup_radius: float = DEDUP_RADIUS,
    max_iter: int = 60,
    nonnegative: bool = False,
) -> list[EquilibriumPoint]:
    """All zeros reachable by Newton from a uniform grid of seeds in ``box``.

    Seeds whose iterates wander out of the box inflated 1.5x are dropped.
    Zeros lying on the box boundary (within 1e-9) are not counted as
    inside.  ``nonnegative`` additionally drops zeros with a negative
    coordinate.  The result is deduplicated and sorted lexicographically.
    """
    if grid_per_axis < 2:
        raise ValueError("grid_per_axis must be >= 2")
    if box.dim != model.dim:
        raise ValueError("box and model dimensions differ")
    fence = box.scaled(1.5)
    found = []
    for seed in _grid_nodes(box, grid_per_axis):
        try:
            eq = newton_refine(model, seed, tol=tol, max_iter=max_iter, bounds=fence)
        except NewtonFailure:
            continue
        if not box.contains(eq.location, slack=-BOUNDARY_MARGIN):
            continue
        if nonnegative and min(eq.location) < 0:
            continue
        found.append(eq)
    return dedupe(found, dedup_radius)
