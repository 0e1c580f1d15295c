"""Parameter sweeps, branch assembly and pitchfork detection.

Most functions here take a *family*: a callable mapping a parameter value
to a :class:`~pitchfork.fields.Model`.  :func:`family` builds one from a
registry id, which covers the common case of sweeping a single named
parameter while the others stay fixed; a hand-written lambda covers tied
parameters such as ``b = a + 0.1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .equilibria import find_equilibria
from .fields import Box, Model, make_model
from .stability import Classification, classify, spectrum

__all__ = [
    "Branch",
    "EquilibriumRecord",
    "PitchforkVerdict",
    "SweepRecord",
    "assemble_branches",
    "classify_pitchfork",
    "detect_bifurcation",
    "family",
    "isocline_sample",
    "param_grid",
    "sweep",
    "tangency_check",
]

Family = Callable[[float], Model]


def family(model_id: str, param_name: str, **fixed: float) -> Family:
    def build(value: float) -> Model:
        return make_model(model_id, {**fixed, param_name: value})

    build.__name__ = f"{model_id}[{param_name}]"
    return build


def param_grid(lo: float, hi: float, step: float) -> list[float]:
    """``lo, lo+step, ...`` up to ``hi`` inclusive, rounded to 12 decimals."""
    if not lo < hi or step <= 0:
        raise ValueError("need lo < hi and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9))
    return [round(lo + i * step, 12) for i in range(count + 1)]


@dataclass(frozen=True)
class EquilibriumRecord:
    point: tuple[float, ...]
    classification: Classification
    eigenvalues: tuple[complex, ...]


@dataclass(frozen=True)
class SweepRecord:
    param: float
    equilibria: tuple[EquilibriumRecord, ...]

    def count(self, kind: str) -> int:
        return sum(1 for eq in self.equilibria if eq.classification.kind == kind)


def analyse(
    model: Model, box: Box, grid_per_axis: int = 25, tol: float = 1e-10, nonnegative: bool = False
) -> tuple[EquilibriumRecord, ...]:
    """Equilibria in ``box`` together with their classification."""
    out = []
    for eq in find_equilibria(model, box, grid_per_axis, tol, nonnegative=nonnegative):
        jac = model.jacobian(eq.location)
        cls = classify(jac)
        if eq.degenerate and cls.kind not in ("degenerate", "nonhyperbolic-complex"):
            cls = Classification("degenerate", cls.unstable_count, 0)
        out.append(EquilibriumRecord(eq.location, cls, spectrum(jac).eigenvalues))
    return tuple(out)


def sweep(
    fam: Family,
    values: Sequence[float],
    box: Box,
    grid_per_axis: int = 25,
    tol: float = 1e-10,
) -> list[SweepRecord]:
    """One :class:`SweepRecord` per parameter value (see :func:`param_grid`)."""
    return [SweepRecord(float(v), analyse(fam(v), box, grid_per_axis, tol)) for v in values]


@dataclass
class Branch:
    params: list[float] = field(default_factory=list)
    points: list[tuple[float, ...]] = field(default_factory=list)
    classes: list[Classification] = field(default_factory=list)
    ambiguous: bool = False

    def add(self, param, rec: EquilibriumRecord):
        self.params.append(param)
        self.points.append(rec.point)
        self.classes.append(rec.classification)

    @property
    def kinds(self) -> list[str]:
        return [c.kind for c in self.classes]

    def __len__(self):
        return len(self.params)


def _dist(p, q) -> float:
    return math.dist(p, q)


def default_matching_tol(records: Sequence[SweepRecord]) -> float:
    """``5 * step * (1 + speed)`` with the speed estimated from nearest-neighbour moves."""
    if len(records) < 2:
        return math.inf
    steps = [b.param - a.param for a, b in zip(records, records[1:])]
    step = max(steps)
    speed = 0.0
    for a, b in zip(records, records[1:]):
        h = b.param - a.param
        for eq in b.equilibria:
            if a.equilibria:
                near = min(_dist(eq.point, e.point) for e in a.equilibria)
                speed = max(speed, near / h)
    return 5.0 * step * (1.0 + speed)


def assemble_branches(records: Sequence[SweepRecord], matching_tol: float | None = None) -> list[Branch]:
    """Link equilibria of consecutive records into branches.

    Pairs are matched greedily by increasing distance, one to one, within
    ``matching_tol``.  An equilibrium left unmatched starts a new branch; a
    branch left unmatched ends.  When a point had a second candidate within
    tolerance the chosen branch is flagged ``ambiguous``.
    """
    records = list(records)
    if any(b.param <= a.param for a, b in zip(records, records[1:])):
        raise ValueError("records must be sorted by parameter")
    tol = default_matching_tol(records) if matching_tol is None else matching_tol
    branches: list[Branch] = []
    active: list[Branch] = []
    for rec in records:
        pairs = sorted(
            (_dist(br.points[-1], eq.point), bi, ei)
            for bi, br in enumerate(active)
            for ei, eq in enumerate(rec.equilibria)
        )
        used_b, used_e = set(), set()
        links = {}
        for d, bi, ei in pairs:
            if d > tol:
                break
            if bi in used_b or ei in used_e:
                continue
            used_b.add(bi)
            used_e.add(ei)
            links[ei] = bi
        nxt = []
        for ei, eq in enumerate(rec.equilibria):
            if ei in links:
                br = active[links[ei]]
                rivals = [bi for d, bi, e in pairs if e == ei and d <= tol and bi != links[ei]]
                if rivals:
                    br.ambiguous = True
            else:
                br = Branch()
                branches.append(br)
            br.add(rec.param, eq)
            nxt.append(br)
        active = nxt
    return branches


def _max_real(model: Model, point) -> float:
    return max(ev.real for ev in spectrum(model.jacobian(point)).eigenvalues)


def _det(model: Model, point) -> float:
    return float(np.linalg.det(model.jacobian(point)))


def detect_bifurcation(
    fam: Family,
    bracket: tuple[float, float],
    branch_point: Sequence[float] | Callable[[float], Sequence[float]],
    tol: float = 1e-9,
    criterion: str = "det",
) -> float:
    """Bisect for the parameter where the branch Jacobian turns singular.

    ``criterion`` selects the test function: ``"det"`` for ``det J`` or
    ``"max-real"`` for the largest eigenvalue real part.
    """
    test = {"det": _det, "max-real": _max_real}[criterion]

    def g(p):
        pt = branch_point(p) if callable(branch_point) else branch_point
        return test(fam(p), pt)

    lo, hi = bracket
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0:
        return lo
    if g_hi == 0:
        return hi
    if (g_lo > 0) == (g_hi > 0):
        raise ValueError(f"no sign change of {criterion} on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0:
            return mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class PitchforkVerdict:
    bifurcation_param: float
    kind: str  # pitchfork, not-pitchfork, inconclusive
    pre_count: int
    pre_sinks: int
    post_sinks: int
    post_saddles: int
    amplitude_exponent: float | None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "bifurcation_param": self.bifurcation_param,
            "kind": self.kind,
            "pre_count": self.pre_count,
            "pre_sinks": self.pre_sinks,
            "post_sinks": self.post_sinks,
            "post_saddles": self.post_saddles,
            "amplitude_exponent": self.amplitude_exponent,
            "reason": self.reason,
        }


def _one_unstable(rec: EquilibriumRecord) -> bool:
    # a saddle in the plane; in 1D the same role is played by a source
    return rec.classification.unstable_count == 1 and rec.classification.kind in ("saddle", "source")


def flank_amplitudes(
    fam: Family,
    p_star: float,
    offsets: Sequence[float],
    start_box: Box,
    center: Sequence[float],
    grid_per_axis: int = 25,
) -> list[float] | None:
    """Mean distance of the two new sinks from the central equilibrium.

    ``offsets`` must be decreasing.  Each search box is centred on the
    central point found at the previous offset, with half-width 1.5 times
    the previous amplitude.  Returns ``None`` if at any offset the box does
    not hold exactly one central point and two sinks.
    """
    amps = []
    box = start_box
    center = tuple(center)
    for off in offsets:
        recs = analyse(fam(p_star + off), box, grid_per_axis)
        if len(recs) != 3:
            return None
        mid = min(recs, key=lambda r: _dist(r.point, center))
        flanks = [r for r in recs if r is not mid]
        if not all(r.classification.kind == "sink" for r in flanks):
            return None
        center = mid.point
        amp = float(np.mean([_dist(r.point, center) for r in flanks]))
        amps.append(amp)
        half = 1.5 * amp
        box = Box(tuple(c - half for c in center), tuple(c + half for c in center))
    return amps


def fit_exponent(offsets: Sequence[float], amplitudes: Sequence[float]) -> float:
    """Least-squares slope of ``log amplitude`` against ``log offset``."""
    slope, _ = np.polyfit(np.log(offsets), np.log(amplitudes), 1)
    return float(slope)


def classify_pitchfork(
    fam: Family,
    p_star: float,
    window: float,
    box: Box,
    steps: int = 10,
    grid_per_axis: int = 25,
    fit_samples: int = 13,
) -> PitchforkVerdict:
    """Decide whether the bifurcation at ``p_star`` is a pitchfork.

    The family is swept over ``p_star +/- window`` (skipping ``p_star``
    itself) and the branches assembled.  A pitchfork needs a lone sink
    before, and afterwards exactly two sinks plus the continuation of that
    sink with one unstable direction.  The same ``fit_samples`` log-spaced
    offsets (``window/2`` down to ``window * 5e-4``) are used to confirm a
    lone sink just below ``p_star`` and to fit the amplitude exponent of
    the new sinks just above it.
    """
    if window <= 0:
        raise ValueError("window must be positive")
    h = window / steps
    values = [p_star - window + (i + 0.5) * h for i in range(steps)]
    values += [p_star + (i + 0.5) * h for i in range(steps)]
    values[-1] = p_star + window
    values[0] = p_star - window
    records = sweep(fam, values, box, grid_per_axis)
    pre, post = records[0], records[-1]
    n_sinks = post.count("sink")
    n_saddles = sum(1 for r in post.equilibria if _one_unstable(r))
    pre_sinks = pre.count("sink")

    def verdict(kind, reason, exponent=None):
        return PitchforkVerdict(
            p_star, kind, len(pre.equilibria), pre_sinks, n_sinks, n_saddles, exponent, reason
        )

    if len(pre.equilibria) != 1 or pre_sinks != 1:
        return verdict("not-pitchfork", f"{len(pre.equilibria)} equilibria ({pre_sinks} sinks) before")
    if len(post.equilibria) != 3 or n_sinks != 2 or n_saddles != 1:
        return verdict("not-pitchfork", f"after: {len(post.equilibria)} equilibria, {n_sinks} sinks, {n_saddles} saddles")

    branches = assemble_branches(records)
    old = [b for b in branches if b.params[0] == pre.param]
    if len(old) != 1:
        return verdict("inconclusive", "could not follow the original sink")
    old = old[0]
    if old.params[-1] != post.param:
        return verdict("not-pitchfork", "original sink does not persist through the window")
    below = [k for p, k in zip(old.params, old.kinds) if p < p_star]
    above = [c for p, c in zip(old.params, old.classes) if p > p_star]
    if any(k != "sink" for k in below):
        return verdict("not-pitchfork", "original branch loses stability before the bifurcation")
    if any(c.unstable_count != 1 or c.kind == "degenerate" for c in above):
        return verdict("not-pitchfork", "continued central branch is not a saddle after the bifurcation")
    born = [b for b in branches if b is not old and b.params[-1] == post.param]
    if len(born) != 2 or any(b.params[0] < p_star for b in born):
        return verdict("not-pitchfork", "new sinks were not born at the bifurcation")

    # the sweep is coarse; probe close to p_star on both sides as well
    offsets = [float(o) for o in np.geomspace(0.5 * window, 5e-4 * window, fit_samples)]
    for off in offsets:
        near = analyse(fam(p_star - off), box, grid_per_axis)
        if len(near) != 1 or near[0].classification.kind != "sink":
            return verdict(
                "not-pitchfork",
                f"{len(near)} equilibria at {p_star - off:.6g}, just before the bifurcation",
            )
    amps = flank_amplitudes(fam, p_star, offsets, box, old.points[-1], grid_per_axis)
    if amps is None:
        return verdict("inconclusive", "flank equilibria could not be tracked towards the bifurcation")
    return verdict("pitchfork", "", fit_exponent(offsets, amps))


def isocline_sample(
    a: float,
    y_range: tuple[float, float],
    x_range: tuple[float, float] | None = None,
    count: int = 201,
) -> tuple[np.ndarray, np.ndarray]:
    """Polylines of the two isoclines of the normal form.

    The first is where ``dx/dt = 0``: points ``(y^2 - a y, y)`` over
    ``y_range``.  The second is where ``dy/dt = 0``: ``(x, x^2 - a x)`` over
    ``x_range`` (defaults to ``y_range``).  Each is a ``(count, 2)`` array.
    """
    if count < 2:
        raise ValueError("count must be >= 2")
    x_range = y_range if x_range is None else x_range
    y = np.linspace(*y_range, count)
    x = np.linspace(*x_range, count)
    return np.column_stack([y * y - a * y, y]), np.column_stack([x, x * x - a * x])


def tangency_check(a: float) -> bool:
    """Are the isocline normals ``(1, a)`` and ``(a, 1)`` at the origin parallel?"""
    return abs(a * a - 1.0) <= 1e-12
