"""Vector-field families, boxes and Jacobians.

Every built-in model is a small polynomial or Hill-type field in one or two
variables.  Field formulas are written so that they accept either a point
(a sequence of floats) or a batch of points stacked along the last axis
(an ``(n, k)`` array); the batch form is what the integrator uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Mapping, Sequence

import numpy as np

__all__ = [
    "MODEL_IDS",
    "Box",
    "DomainError",
    "Model",
    "ModelError",
    "evaluate",
    "jacobian_analytic",
    "jacobian_fd",
    "make_model",
]


class ModelError(ValueError):
    """Unknown model id or bad parameter assignment."""


class DomainError(ValueError):
    """A point lies outside the domain where a field is defined."""


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``lower <= x <= upper``."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or not lo:
            raise ValueError("box bounds must have the same, nonzero dimension")
        if not all(math.isfinite(v) for v in lo + hi):
            raise ValueError("box bounds must be finite")
        if any(l >= h for l, h in zip(lo, hi)):
            raise ValueError(f"box needs lower < upper on every axis, got {lo} / {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> "Box":
        """Build from ``(x_lo, x_hi, y_lo, y_hi, ...)``."""
        values = [float(v) for v in values]
        if len(values) % 2 or not values:
            raise ValueError("flat box needs an even number of values")
        return cls(tuple(values[0::2]), tuple(values[1::2]))

    @classmethod
    def square(cls, lo: float, hi: float, dim: int = 2) -> "Box":
        return cls((lo,) * dim, (hi,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def center(self) -> tuple[float, ...]:
        return tuple(0.5 * (l + h) for l, h in zip(self.lower, self.upper))

    def flat(self) -> tuple[float, ...]:
        return tuple(v for pair in zip(self.lower, self.upper) for v in pair)

    def contains(self, x: Sequence[float], slack: float = 0.0) -> bool:
        return all(l - slack <= v <= h + slack for v, l, h in zip(x, self.lower, self.upper))

    def scaled(self, factor: float) -> "Box":
        """Same center, every side multiplied by ``factor``."""
        c = self.center
        half = [0.5 * factor * (h - l) for l, h in zip(self.lower, self.upper)]
        return Box(tuple(ci - r for ci, r in zip(c, half)), tuple(ci + r for ci, r in zip(c, half)))


# --- field formulas -------------------------------------------------------


def _pow(base, e: float):
    """``base ** e`` restricted to real results."""
    if float(e).is_integer():
        return base ** int(e)
    if isinstance(base, float):
        if base < 0:
            raise DomainError(f"negative base with non-integer exponent {e}")
        return base ** e
    if np.any(np.asarray(base) < 0):
        raise DomainError(f"negative base with non-integer exponent {e}")
    return base ** e


def _hill_repression(s, alpha: float, m: float):
    return alpha / (1.0 + _pow(s, m))


def _hill_repression_slope(s: float, alpha: float, m: float) -> float:
    if m == 0:
        return 0.0
    if s == 0 and m < 1:
        raise DomainError("repression slope is unbounded at 0 for exponent < 1")
    denom = 1.0 + _pow(s, m)
    return -alpha * m * _pow(s, m - 1) / (denom * denom)


def _check_toggle_domain(x) -> None:
    for c in x:
        if (c <= -1.0) if isinstance(c, float) else np.any(np.asarray(c) <= -1.0):
            raise DomainError("toggle models are defined for coordinates > -1")


def _pitchfork1d(x, p):
    (u,) = x[:1]
    return (p["mu"] * u - u ** 3,)


def _pitchfork1d_jac(x, p):
    return [[p["mu"] - 3.0 * x[0] ** 2]]


def _normal2d_asym(x, p):
    u, v = x[0], x[1]
    return (v * v - p["a"] * v - u, u * u - p["b"] * u - v)


def _normal2d_asym_jac(x, p):
    u, v = x[0], x[1]
    return [[-1.0, 2.0 * v - p["a"]], [2.0 * u - p["b"], -1.0]]


def _normal2d(x, p):
    u, v = x[0], x[1]
    a = p["a"]
    return (v * v - a * v - u, u * u - a * u - v)


def _normal2d_jac(x, p):
    u, v = x[0], x[1]
    a = p["a"]
    return [[-1.0, 2.0 * v - a], [2.0 * u - a, -1.0]]


def _toggle_general(x, p):
    _check_toggle_domain(x)
    u, v = x[0], x[1]
    return (
        _hill_repression(v, p["alpha1"], p["m"]) - u,
        _hill_repression(u, p["alpha2"], p["n"]) - v,
    )


def _toggle_general_jac(x, p):
    _check_toggle_domain(x)
    u, v = float(x[0]), float(x[1])
    return [
        [-1.0, _hill_repression_slope(v, p["alpha1"], p["m"])],
        [_hill_repression_slope(u, p["alpha2"], p["n"]), -1.0],
    ]


def _sym_params(p):
    return {"alpha1": 2.0, "alpha2": 2.0, "m": p["m"], "n": p["m"]}


def _toggle_sym(x, p):
    return _toggle_general(x, _sym_params(p))


def _toggle_sym_jac(x, p):
    return _toggle_general_jac(x, _sym_params(p))


def _toggle_taylor(x, p):
    u, v = x[0], x[1]
    m = p["m"]
    return (
        0.5 * m * v * v - 1.5 * m * v + m + 1.0 - u,
        0.5 * m * u * u - 1.5 * m * u + m + 1.0 - v,
    )


def _toggle_taylor_jac(x, p):
    u, v = x[0], x[1]
    m = p["m"]
    return [[-1.0, m * v - 1.5 * m], [m * u - 1.5 * m, -1.0]]


def _nonneg(*names):
    def check(p):
        for name in names:
            if p[name] < 0:
                raise ModelError(f"{name} must be >= 0")
    return check


def _positive(*names):
    def check(p):
        for name in names:
            if p[name] <= 0:
                raise ModelError(f"{name} must be > 0")
    return check


@dataclass(frozen=True)
class _Entry:
    dim: int
    params: tuple[str, ...]
    rhs: Callable
    jac: Callable
    checks: tuple[Callable, ...] = ()


_REGISTRY: dict[str, _Entry] = {
    "pitchfork1d": _Entry(1, ("mu",), _pitchfork1d, _pitchfork1d_jac),
    "normal2d": _Entry(2, ("a",), _normal2d, _normal2d_jac),
    "normal2d-asym": _Entry(2, ("a", "b"), _normal2d_asym, _normal2d_asym_jac),
    "toggle-general": _Entry(
        2,
        ("alpha1", "alpha2", "m", "n"),
        _toggle_general,
        _toggle_general_jac,
        (_nonneg("m", "n"), _positive("alpha1", "alpha2")),
    ),
    "toggle-sym": _Entry(2, ("m",), _toggle_sym, _toggle_sym_jac, (_nonneg("m"),)),
    "toggle-taylor": _Entry(2, ("m",), _toggle_taylor, _toggle_taylor_jac, (_nonneg("m"),)),
}

MODEL_IDS = tuple(_REGISTRY)


@dataclass(frozen=True, eq=False)
class Model:
    """A registry field bound to concrete parameter values.

    Build instances with :func:`make_model`.
    """

    model_id: str
    params: Mapping[str, float]
    dim: int

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return self.model_id == other.model_id and dict(self.params) == dict(other.params)

    def __hash__(self):
        return hash((self.model_id, tuple(sorted(self.params.items()))))

    @property
    def _entry(self) -> _Entry:
        return _REGISTRY[self.model_id]

    def rhs(self, x):
        """Raw field components; ``x`` may be a point or an ``(n, k)`` batch."""
        return self._entry.rhs(x, self.params)

    def jac(self, x) -> list[list[float]]:
        """Raw analytic Jacobian as nested lists (single point only)."""
        return self._entry.jac(x, self.params)

    def evaluate(self, x: Sequence[float]) -> np.ndarray:
        return evaluate(self, x)

    def jacobian(self, x: Sequence[float]) -> np.ndarray:
        return jacobian_analytic(self, x)

    def with_params(self, **changes: float) -> "Model":
        return make_model(self.model_id, {**self.params, **changes})


def make_model(model_id: str, params: Mapping[str, float] | None = None) -> Model:
    """Look up ``model_id`` in the registry and bind ``params`` to it.

    Raises :class:`ModelError` for unknown ids, missing or non-finite
    parameters, and values outside the allowed range (e.g. negative Hill
    exponents).  Unrecognized parameter names are rejected as well.
    """
    try:
        entry = _REGISTRY[model_id]
    except KeyError:
        raise ModelError(f"unknown model {model_id!r}; choose from {', '.join(MODEL_IDS)}") from None
    params = dict(params or {})
    extra = set(params) - set(entry.params)
    if extra:
        raise ModelError(f"{model_id} does not take parameter(s) {', '.join(sorted(extra))}")
    bound = {}
    for name in entry.params:
        if name not in params:
            raise ModelError(f"{model_id} needs parameter {name!r}")
        value = float(params[name])
        if not math.isfinite(value):
            raise ModelError(f"{name} must be finite")
        bound[name] = value
    for check in entry.checks:
        check(bound)
    return Model(model_id, MappingProxyType(bound), entry.dim)


def _as_point(model: Model, x: Sequence[float]) -> tuple[float, ...]:
    pt = tuple(float(v) for v in np.atleast_1d(np.asarray(x, dtype=float)))
    if len(pt) != model.dim:
        raise ValueError(f"{model.model_id} is {model.dim}-dimensional, got a point of length {len(pt)}")
    if not all(math.isfinite(v) for v in pt):
        raise ValueError("point coordinates must be finite")
    return pt


def evaluate(model: Model, x: Sequence[float]) -> np.ndarray:
    """Velocity of ``model`` at the point ``x``."""
    return np.array(model.rhs(_as_point(model, x)), dtype=float)


def jacobian_analytic(model: Model, x: Sequence[float]) -> np.ndarray:
    return np.array(model.jac(_as_point(model, x)), dtype=float)


def jacobian_fd(model: Model, x: Sequence[float], step: float | None = None) -> np.ndarray:
    """Central-difference Jacobian.

    The default step along axis ``i`` is ``1e-6 * max(1, |x_i|)``; an explicit
    ``step`` is used unscaled on every axis.
    """
    pt = np.array(_as_point(model, x))
    if step is not None and step <= 0:
        raise ValueError("step must be positive")
    n = model.dim
    jac = np.empty((n, n))
    for j in range(n):
        h = step if step is not None else 1e-6 * max(1.0, abs(pt[j]))
        fwd, back = pt.copy(), pt.copy()
        fwd[j] += h
        back[j] -= h
        jac[:, j] = (np.array(model.rhs(fwd)) - np.array(model.rhs(back))) / (2.0 * h)
    return jac
