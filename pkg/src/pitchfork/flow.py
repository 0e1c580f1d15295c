"""Fixed-step RK4 trajectories, convergence tests and basin probing."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .fields import DomainError, Model, make_model

__all__ = [
    "BasinProbeReport",
    "Convergence",
    "Trajectory",
    "converges_to",
    "integrate",
    "integrate_batch",
    "probe_points",
    "uniformity_probe",
]

BLOWUP = 1e12


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray   # (k,)
    states: np.ndarray  # (k, n)
    diverged: bool = False

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _time_grid(t_end: float, dt: float) -> np.ndarray:
    if t_end <= 0 or dt <= 0:
        raise ValueError("t_end and dt must be positive")
    steps = math.ceil(t_end / dt - 1e-9)
    times = np.arange(steps + 1) * dt
    times[-1] = t_end
    return times


def integrate_batch(model: Model, x0: np.ndarray, t_end: float, dt: float = 0.01):
    """RK4 for many initial points at once.

    ``x0`` has shape ``(n, k)``, one column per initial point.  Returns
    ``(times, states, diverged)`` with ``states`` of shape
    ``(len(times), n, k)``; ``diverged`` marks columns that blew up or left
    the domain, and their states are NaN from then on.
    """
    times = _time_grid(t_end, dt)
    x = np.array(x0, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, k = x.shape
    if n != model.dim:
        raise ValueError(f"{model.model_id} is {model.dim}-dimensional, got {n} rows")
    diverged = np.zeros(k, dtype=bool)
    out = np.full((len(times), n, k), np.nan)
    out[0] = x

    def f(y):
        return np.array(model.rhs(y))

    def step(y, h):
        k1 = f(y)
        k2 = f(y + (0.5 * h) * k1)
        k3 = f(y + (0.5 * h) * k2)
        k4 = f(y + h * k3)
        return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    for i in range(1, len(times)):
        h = times[i] - times[i - 1]
        cols = np.flatnonzero(~diverged) if diverged.any() else slice(None)
        y = x[:, cols]
        try:
            y = step(y, h)
        except DomainError:
            # redo column by column so only the offending points stop
            y = y.copy()
            for j in range(y.shape[1]):
                try:
                    y[:, j:j + 1] = step(y[:, j:j + 1], h)
                except DomainError:
                    y[:, j] = np.nan
        x[:, cols] = y
        if not np.abs(y).max() <= BLOWUP:
            with np.errstate(invalid="ignore"):
                bad = ~np.all(np.abs(x) <= BLOWUP, axis=0)
            diverged |= bad
            x[:, diverged] = np.nan
        out[i] = x
        if diverged.all():
            break
    return times, out, diverged


def integrate(model: Model, x0: Sequence[float], t_end: float, dt: float = 0.01) -> Trajectory:
    """Classical fixed-step RK4 from ``x0`` up to ``t_end``.

    The last step is shortened to land exactly on ``t_end``.  If the state
    leaves the model's domain or grows past 1e12 the trajectory is cut at
    the last good state and flagged ``diverged``.
    """
    times = _time_grid(t_end, dt)
    x = tuple(float(v) for v in np.ravel(x0))
    if len(x) != model.dim:
        raise ValueError(f"{model.model_id} is {model.dim}-dimensional, got a point of length {len(x)}")
    rhs = model.rhs
    states = [x]
    for i in range(1, len(times)):
        h = times[i] - times[i - 1]
        try:
            k1 = rhs(x)
            k2 = rhs(tuple(a + 0.5 * h * b for a, b in zip(x, k1)))
            k3 = rhs(tuple(a + 0.5 * h * b for a, b in zip(x, k2)))
            k4 = rhs(tuple(a + h * b for a, b in zip(x, k3)))
        except (DomainError, OverflowError):
            return Trajectory(times[:i], np.array(states), True)
        x = tuple(
            a + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            for a, b1, b2, b3, b4 in zip(x, k1, k2, k3, k4)
        )
        if not all(abs(c) <= BLOWUP for c in x):
            return Trajectory(times[:i], np.array(states), True)
        states.append(x)
    return Trajectory(times, np.array(states))


@dataclass(frozen=True)
class Convergence:
    converged: bool
    hit_time: float | None
    diverged: bool = False

    def __bool__(self):
        return self.converged


def _settled(times, dist, tol):
    """(converged, first time of the final stay inside tol)."""
    k = len(times)
    tail = max(1, int(math.ceil(0.1 * k)))
    inside = dist <= tol
    if not inside[k - tail:].all():
        return False, None
    outside = np.flatnonzero(~inside)
    start = 0 if len(outside) == 0 else int(outside[-1]) + 1
    return True, float(times[start])


def converges_to(
    model: Model,
    x0: Sequence[float],
    target: Sequence[float],
    tol: float = 1e-6,
    t_max: float = 200.0,
    dt: float = 0.01,
) -> Convergence:
    """True when the trajectory sits within ``tol`` of ``target`` over the last 10% of the run."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    traj = integrate(model, x0, t_max, dt)
    if traj.diverged:
        return Convergence(False, None, True)
    dist = np.max(np.abs(traj.states - np.asarray(target, dtype=float)), axis=1)
    ok, hit = _settled(traj.times, dist, tol)
    return Convergence(ok, hit)


def probe_points(center: Sequence[float], radius: float, samples: int) -> np.ndarray:
    """Deterministic points on the sphere of ``radius``: equal angles in 2D, both ends in 1D."""
    c = np.asarray(center, dtype=float)
    if c.size == 1:
        return np.array([[c[0] - radius], [c[0] + radius]]).T  # (1, 2)
    if c.size == 2:
        theta = 2 * np.pi * np.arange(samples) / samples
        return np.vstack([c[0] + radius * np.cos(theta), c[1] + radius * np.sin(theta)])
    raise ValueError("probe points are only defined in 1D and 2D")


@dataclass(frozen=True)
class BasinProbeReport:
    param_grid: tuple[float, ...]
    radius: float
    sample_count: int
    failures: tuple[tuple[float, tuple[float, ...]], ...]

    @property
    def verdict(self) -> str:
        return "uniform" if not self.failures else "non-uniform"

    def to_dict(self) -> dict:
        return {
            "param_grid": list(self.param_grid),
            "radius": self.radius,
            "sample_count": self.sample_count,
            "failures": [{"param": p, "initial_point": list(x)} for p, x in self.failures],
            "verdict": self.verdict,
        }


def uniformity_probe(
    model_id: str,
    fixed_params: Mapping[str, float],
    param_name: str,
    param_grid: Sequence[float],
    branch: Sequence[float] | Callable[[float], Sequence[float]],
    radius: float,
    samples: int = 16,
    tol: float = 1e-3,
    t_max: float = 200.0,
    dt: float = 0.01,
) -> BasinProbeReport:
    """Check that a fixed ball around the branch equilibrium stays in its basin.

    For every parameter value, trajectories start on the sphere of
    ``radius`` around the branch point; any that do not settle back within
    ``tol`` by ``t_max`` are recorded as failures.  ``branch`` is either a
    fixed point or a function of the parameter.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    failures = []
    count = 0
    for p in param_grid:
        model = make_model(model_id, {**fixed_params, param_name: p})
        center = np.asarray(branch(p) if callable(branch) else branch, dtype=float).ravel()
        starts = probe_points(center, radius, samples)
        count = starts.shape[1]
        times, states, diverged = integrate_batch(model, starts, t_max, dt)
        dist = np.max(np.abs(states - center[None, :, None]), axis=1)  # (steps, k)
        for j in range(count):
            ok = not diverged[j] and _settled(times, dist[:, j], tol)[0]
            if not ok:
                failures.append((float(p), tuple(float(v) for v in starts[:, j])))
    return BasinProbeReport(tuple(float(p) for p in param_grid), float(radius), count, tuple(failures))
