"""The symmetric toggle switch around (1, 1) and its quadratic surrogate."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibria import LOOSE_RADIUS, find_equilibria
from .fields import Box, Model, make_model

__all__ = [
    "TaylorCoefficients",
    "correspondence_residual",
    "taylor_coefficients",
    "taylor_field",
    "unique_equilibrium_check",
]


@dataclass(frozen=True)
class TaylorCoefficients:
    """Partial derivatives of the symmetric toggle at (1, 1).

    ``constant`` is the collected constant ``m + 1`` of the surrogate field.
    Derivatives not listed (``f_xx``, ``f_xy``, ``g_yy``, ``g_xy``) vanish.
    """

    m: float
    f_x: float
    f_y: float
    g_x: float
    g_y: float
    f_yy: float
    g_xx: float
    constant: float
    f_xx: float = 0.0
    f_xy: float = 0.0
    g_yy: float = 0.0
    g_xy: float = 0.0

    def second_order(self, x: float, y: float) -> tuple[float, float]:
        """The genuine second-order Taylor polynomial about (1, 1)."""
        u, v = x - 1.0, y - 1.0
        f = self.f_x * u + self.f_y * v + 0.5 * (self.f_xx * u * u + 2 * self.f_xy * u * v + self.f_yy * v * v)
        g = self.g_x * u + self.g_y * v + 0.5 * (self.g_xx * u * u + 2 * self.g_xy * u * v + self.g_yy * v * v)
        return f, g


def taylor_coefficients(m: float) -> TaylorCoefficients:
    if m < 0:
        raise ValueError("m must be >= 0")
    half = 0.5 * m
    return TaylorCoefficients(
        m=m, f_x=-1.0, f_y=-half, g_x=-half, g_y=-1.0, f_yy=half, g_xx=half, constant=m + 1.0
    )


def taylor_field(m: float) -> Model:
    """Quadratic surrogate ``dx/dt = m/2 y^2 - 3m/2 y + m + 1 - x`` (and symmetric)."""
    return make_model("toggle-taylor", {"m": m})


def _grid(box: Box, density: int):
    xs = np.linspace(box.lower[0], box.upper[0], density)
    ys = np.linspace(box.lower[1], box.upper[1], density)
    return np.meshgrid(xs, ys, indexing="ij")


def correspondence_residual(grid: Box, density: int = 21, m: float = 2.0, a: float = 1.0) -> float:
    """Largest gap between the shifted surrogate and the normal form on a grid.

    Compares ``taylor_field(m)`` at ``(u + 1, v + 1)`` with the normal form
    with parameter ``a`` at ``(u, v)``, for ``(u, v)`` on a
    ``density x density`` grid over ``grid``.  Zero up to roundoff when
    ``m = 2`` and ``a = 1``.
    """
    if density < 2:
        raise ValueError("density must be >= 2")
    u, v = _grid(grid, density)
    surrogate = taylor_field(m).rhs((u + 1.0, v + 1.0))
    normal = make_model("normal2d", {"a": a}).rhs((u, v))
    return float(max(np.max(np.abs(s - n)) for s, n in zip(surrogate, normal)))


def unique_equilibrium_check(m: float, box: Box = Box((0.0, 0.0), (4.0, 4.0)), grid_per_axis: int = 25) -> bool:
    """Is (1, 1) the only equilibrium of the symmetric toggle inside ``box``?"""
    eqs = find_equilibria(make_model("toggle-sym", {"m": m}), box, grid_per_axis)
    return len(eqs) == 1 and max(abs(c - 1.0) for c in eqs[0].location) <= LOOSE_RADIUS
