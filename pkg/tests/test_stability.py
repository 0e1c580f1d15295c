import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pitchfork.fields import make_model
from pitchfork.stability import (
    _closed_form_flanking_eigenvalues,
    classify,
    complex_transition_threshold,
    eigen2x2,
    flanking_discriminant,
    flanking_spectrum,
    sign_det,
    spectrum,
)

entries = st.floats(-10.0, 10.0, allow_nan=False)


@settings(max_examples=150, deadline=None)
@given(p=entries, q=entries, r=entries, s=entries)
def test_trace_and_determinant(p, q, r, s):
    jac = np.array([[p, q], [r, s]])
    l1, l2 = eigen2x2(jac).eigenvalues
    scale = 1.0 + np.abs(jac).max() ** 2
    assert abs((l1 + l2) - (p + s)) <= 1e-9 * scale
    assert abs(l1 * l2 - (p * s - q * r)) <= 1e-9 * scale


@settings(max_examples=100, deadline=None)
@given(p=entries, q=entries, r=entries, s=entries)
def test_agrees_with_numpy(p, q, r, s):
    jac = np.array([[p, q], [r, s]])
    ours = sorted(eigen2x2(jac).eigenvalues, key=lambda z: (z.real, z.imag))
    ref = sorted(np.linalg.eigvals(jac), key=lambda z: (z.real, z.imag))
    assert np.allclose(ours, ref, atol=1e-7 * (1 + np.abs(jac).max()))


def test_eigenvectors_of_symmetric_origin():
    spec = spectrum(make_model("normal2d", {"a": 2.0}).jacobian((0.0, 0.0)))
    assert spec.eigenvalues == (1.0, -3.0)
    (v1, v2) = spec.eigenvectors
    assert abs(v1[0] + v1[1]) <= 1e-12  # along (-1, 1)
    assert abs(v2[0] - v2[1]) <= 1e-12  # along (1, 1)


@pytest.mark.parametrize(
    "jac,kind,unstable",
    [
        ([[-1.0, 0.0], [0.0, -2.0]], "sink", 0),
        ([[1.0, 0.0], [0.0, 2.0]], "source", 2),
        ([[1.0, 0.0], [0.0, -2.0]], "saddle", 1),
        ([[-1.0, -1.0], [-1.0, -1.0]], "degenerate", 0),
        ([[0.0, 1.0], [-1.0, 0.0]], "nonhyperbolic-complex", 0),
        ([[-1.0, 4.0], [-4.0, -1.0]], "sink", 0),
        ([[-0.5]], "sink", 0),
        ([[0.5]], "source", 1),
    ],
)
def test_classify(jac, kind, unstable):
    cls = classify(np.array(jac))
    assert cls.kind == kind and cls.unstable_count == unstable


def test_sign_det():
    assert sign_det(np.array([[1.0, 0.0], [0.0, -1.0]])) == -1
    assert sign_det(np.array([[1.0, 1.0], [1.0, 1.0]])) == 0
    assert sign_det(np.array([[2.0, 0.0], [0.0, 3.0]])) == 1


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0, 2.0, 5.0])
def test_origin_spectrum(a):
    ev = spectrum(make_model("normal2d", {"a": a}).jacobian((0.0, 0.0))).eigenvalues
    assert sorted(z.real for z in ev) == pytest.approx(sorted([a - 1, -a - 1]), abs=1e-12)


def test_origin_changes_type_at_one():
    def kind(a):
        return classify(make_model("normal2d", {"a": a}).jacobian((0.0, 0.0))).kind

    assert kind(0.9) == "sink"
    assert kind(1.0) == "degenerate"
    assert kind(1.1) == "saddle"


@pytest.mark.parametrize("a", [1.05, 1.2, 1.3, 2.0, 3.0, 4.5])
def test_flanking_spectrum_against_closed_form(a):
    ours = sorted(flanking_spectrum(a).eigenvalues, key=lambda z: (z.real, z.imag))
    oracle = sorted(_closed_form_flanking_eigenvalues(a), key=lambda z: (z.real, z.imag))
    assert np.allclose(ours, oracle, atol=1e-12)


def test_flanking_points_are_sinks():
    for a in (1.1, 1.5, 3.0):
        assert all(z.real < 0 for z in flanking_spectrum(a).eigenvalues)


def test_discriminant_sign_change():
    root = math.sqrt(5.0) - 1.0
    assert flanking_discriminant(root - 1e-3) > 0
    assert flanking_discriminant(root + 1e-3) < 0


def test_threshold():
    assert complex_transition_threshold() == pytest.approx(math.sqrt(5.0) - 1.0, abs=1e-8)


def test_threshold_not_at_the_plus_three_variant():
    # -1 +/- sqrt(1 - (a-1)(a+3)) turns complex at sqrt(5)-1, not at sqrt(7)-1
    a = 0.5 * ((math.sqrt(5.0) - 1.0) + (math.sqrt(7.0) - 1.0))
    assert any(abs(z.imag) > 0 for z in flanking_spectrum(a).eigenvalues)
    assert cmath.isclose(*(sum(flanking_spectrum(a).eigenvalues), -2.0))


def test_general_size_uses_dense_solver():
    ev = spectrum(np.diag([1.0, -2.0, 3.0])).eigenvalues
    assert sorted(z.real for z in ev) == [-2.0, 1.0, 3.0]
