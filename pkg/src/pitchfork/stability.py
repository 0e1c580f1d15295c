"""Eigenvalues of small Jacobians and classification of equilibria."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .equilibria import closed_form_equilibria
from .fields import make_model

__all__ = [
    "HYPERBOLICITY_TOL",
    "Classification",
    "Spectrum",
    "classify",
    "complex_transition_threshold",
    "eigen2x2",
    "flanking_discriminant",
    "flanking_spectrum",
    "sign_det",
    "spectrum",
]

HYPERBOLICITY_TOL = 1e-9
DET_ZERO = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues ordered by decreasing real part.

    ``eigenvectors`` (unit length) are only filled in for a 2x2 matrix with
    real, distinct eigenvalues.
    """

    eigenvalues: tuple[complex, ...]
    eigenvectors: tuple[np.ndarray, ...] | None = None

    @property
    def real_parts(self) -> tuple[float, ...]:
        return tuple(ev.real for ev in self.eigenvalues)

    @property
    def is_real(self) -> bool:
        return all(ev.imag == 0 for ev in self.eigenvalues)


@dataclass(frozen=True)
class Classification:
    kind: str  # sink, saddle, source, degenerate, nonhyperbolic-complex
    unstable_count: int
    sign_det: int


def _eigenvector(jac, lam: float) -> np.ndarray:
    (p, q), (r, s) = jac
    # two candidate null vectors of J - lam*I; take the better conditioned one
    v1 = np.array([q, lam - p])
    v2 = np.array([lam - s, r])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    return v / np.linalg.norm(v)


def eigen2x2(jac) -> Spectrum:
    """Roots of ``lam^2 - tr*lam + det`` for a 2x2 matrix."""
    jac = np.asarray(jac, dtype=float)
    if jac.shape != (2, 2):
        raise ValueError("eigen2x2 needs a 2x2 matrix")
    (p, q), (r, s) = jac
    half_tr = 0.5 * (p + s)
    # discriminant written without cancellation: (tr/2)^2 - det = ((p-s)/2)^2 + q*r
    disc = (0.5 * (p - s)) ** 2 + q * r
    if disc < 0:
        w = math.sqrt(-disc)
        return Spectrum((complex(half_tr, w), complex(half_tr, -w)))
    w = math.sqrt(disc)
    lam1, lam2 = half_tr + w, half_tr - w
    vecs = None
    if w > 0:
        vecs = (_eigenvector(jac, lam1), _eigenvector(jac, lam2))
    return Spectrum((complex(lam1), complex(lam2)), vecs)


def spectrum(jac) -> Spectrum:
    """Eigenvalues of a square matrix of any size."""
    jac = np.atleast_2d(np.asarray(jac, dtype=float))
    n = jac.shape[0]
    if jac.shape != (n, n):
        raise ValueError("square matrix required")
    if n == 1:
        return Spectrum((complex(jac[0, 0]),))
    if n == 2:
        return eigen2x2(jac)
    vals = np.linalg.eigvals(jac)
    return Spectrum(tuple(sorted((complex(v) for v in vals), key=lambda z: (-z.real, -z.imag))))


def sign_det(jac, zero: float = DET_ZERO) -> int:
    det = float(np.linalg.det(np.atleast_2d(np.asarray(jac, dtype=float))))
    if abs(det) <= zero:
        return 0
    return 1 if det > 0 else -1


def classify(jac, hyperbolicity_tol: float = HYPERBOLICITY_TOL) -> Classification:
    """Classify an equilibrium from its Jacobian.

    An eigenvalue whose real part lies within ``hyperbolicity_tol`` of zero
    makes the point degenerate (``nonhyperbolic-complex`` when that
    eigenvalue has a nonzero imaginary part).
    """
    spec = spectrum(jac)
    n = len(spec.eigenvalues)
    sd = sign_det(jac)
    unstable = sum(1 for ev in spec.eigenvalues if ev.real > hyperbolicity_tol)
    central = [ev for ev in spec.eigenvalues if abs(ev.real) <= hyperbolicity_tol]
    if central:
        kind = "degenerate" if any(ev.imag == 0 for ev in central) else "nonhyperbolic-complex"
    elif unstable == 0:
        kind = "sink"
    elif unstable == n:
        kind = "source"
    else:
        kind = "saddle"
    return Classification(kind, unstable, sd)


def _flanking_jacobian(a: float) -> np.ndarray:
    if not a > 1:
        raise ValueError("the flanking equilibria are only distinct for a > 1")
    model = make_model("normal2d", {"a": a})
    # second closed-form point: the branch with x > y
    point = closed_form_equilibria(a)[1].location
    return model.jacobian(point)


def flanking_spectrum(a: float) -> Spectrum:
    """Spectrum of the normal form at its flanking equilibrium ``(x2, y2)``."""
    return eigen2x2(_flanking_jacobian(a))


def flanking_discriminant(a: float) -> float:
    """``(tr/2)^2 - det`` of the flanking Jacobian; negative means a complex pair."""
    (p, q), (r, s) = _flanking_jacobian(a)
    return (0.5 * (p - s)) ** 2 + q * r


def complex_transition_threshold(lo: float = 1.0 + 1e-9, hi: float = 3.0, tol: float = 1e-9) -> float:
    """Parameter where the flanking eigenvalues turn from real to complex.

    Bisection on the sign of :func:`flanking_discriminant`.
    """
    f_lo, f_hi = flanking_discriminant(lo), flanking_discriminant(hi)
    if f_lo * f_hi > 0:
        raise ValueError("discriminant does not change sign on the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = flanking_discriminant(mid)
        if f_mid == 0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _closed_form_flanking_eigenvalues(a: float) -> tuple[complex, complex]:
    """``-1 +/- sqrt(1 - (a-1)(a+3))``; the reference the Jacobian route is checked against."""
    root = cmath.sqrt(1.0 - (a - 1.0) * (a + 3.0))
    return (-1 + root, -1 - root)
