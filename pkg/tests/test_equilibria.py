import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pitchfork.equilibria import (
    EquilibriumPoint,
    NewtonFailure,
    closed_form_equilibria,
    dedupe,
    find_equilibria,
    newton_refine,
    residual_norm,
)
from pitchfork.fields import Box, make_model


def _locs(eqs):
    return [eq.location for eq in eqs]


def test_closed_form_at_three():
    r3 = math.sqrt(3.0)
    pts = _locs(closed_form_equilibria(3.0))
    expected = [(0.0, 0.0), (1 + r3, 1 - r3), (1 - r3, 1 + r3), (4.0, 4.0)]
    assert len(pts) == 4
    for e in expected:
        assert min(max(abs(p - q) for p, q in zip(pt, e)) for pt in pts) <= 1e-12


def test_closed_form_below_threshold_has_two_points():
    pts = _locs(closed_form_equilibria(0.5))
    assert pts == [(0.0, 0.0), (1.5, 1.5)]


def test_closed_form_at_bifurcation_merges():
    eqs = closed_form_equilibria(1.0)
    assert [eq.location for eq in eqs] == [(0.0, 0.0), (2.0, 2.0)]
    assert eqs[0].degenerate and not eqs[1].degenerate


@settings(max_examples=80, deadline=None)
@given(a=st.floats(-4.0, 6.0))
def test_closed_form_points_are_zeros(a):
    m = make_model("normal2d", {"a": a})
    for eq in closed_form_equilibria(a):
        assert residual_norm(m, eq.location) <= 1e-9 * (1 + a * a)


def test_newton_converges_quadratically_to_flank():
    m = make_model("normal2d", {"a": 3.0})
    eq = newton_refine(m, (2.5, -0.5))
    assert eq.location == pytest.approx((1 + math.sqrt(3), 1 - math.sqrt(3)), abs=1e-12)
    assert eq.iterations <= 8 and not eq.degenerate


def test_newton_singular():
    m = make_model("normal2d", {"a": 3.0})
    # Jacobian [[-1, 2y-3], [2x-3, -1]] is singular at x = y = 1
    with pytest.raises(NewtonFailure) as info:
        newton_refine(m, (1.0, 1.0))
    assert info.value.reason == "singular"


def test_newton_left_domain():
    m = make_model("normal2d", {"a": 3.0})
    with pytest.raises(NewtonFailure) as info:
        newton_refine(m, (3.9, 3.9), bounds=Box((3.8, 3.8), (3.95, 3.95)))
    assert info.value.reason == "left-domain"


def test_newton_flags_degenerate_root():
    eq = newton_refine(make_model("normal2d", {"a": 1.0}), (0.05, 0.05), tol=1e-10)
    assert eq.degenerate
    assert max(abs(c) for c in eq.location) < 1e-4


def test_find_matches_closed_form():
    for a in (-2.0, 0.5, 2.0, 4.0):
        box = Box.square(-3.0, abs(a) + 3.0)
        found = _locs(find_equilibria(make_model("normal2d", {"a": a}), box))
        expected = _locs(closed_form_equilibria(a))
        assert len(found) == len(expected)
        for e in expected:
            assert min(max(abs(p - q) for p, q in zip(pt, e)) for pt in found) <= 1e-9


def test_find_excludes_boundary_zero():
    # the far point (1.5, 1.5) sits exactly on the corner
    found = find_equilibria(make_model("normal2d", {"a": 0.5}), Box.square(-1.5, 1.5))
    assert _locs(found) == [(0.0, 0.0)]


def test_far_point_meets_origin_at_minus_one():
    found = find_equilibria(make_model("normal2d", {"a": -1.0}), Box.square(-3.0, 3.0))
    assert len(found) == 1 and found[0].degenerate
    assert max(abs(c) for c in found[0].location) <= 1e-6


def test_find_degenerate_single_point():
    found = find_equilibria(make_model("normal2d", {"a": 1.0}), Box.square(-1.5, 1.5))
    assert len(found) == 1 and found[0].degenerate


def _toggle_pair_oracle(m, start=0.1, iters=2000):
    def f(s):
        return 2.0 / (1.0 + s**m)

    x = start
    for _ in range(iters):
        x = f(f(x))
    return x, f(x)


def test_toggle_bistable_pair_against_iteration():
    x, y = _toggle_pair_oracle(3.0)
    found = _locs(find_equilibria(make_model("toggle-sym", {"m": 3.0}), Box.square(0.0, 4.0)))
    assert len(found) == 3
    for target in ((x, y), (y, x), (1.0, 1.0)):
        assert min(max(abs(p - q) for p, q in zip(pt, target)) for pt in found) <= 1e-9


def test_pitchfork1d_equilibria():
    found = _locs(find_equilibria(make_model("pitchfork1d", {"mu": 0.25}), Box.square(-2, 2, dim=1)))
    assert np.allclose(sorted(p[0] for p in found), [-0.5, 0.0, 0.5], atol=1e-10)


def test_dedupe_keeps_best_residual():
    pts = [
        EquilibriumPoint((0.0, 1e-7), 1e-9, "newton"),
        EquilibriumPoint((0.0, 0.0), 1e-15, "newton"),
        EquilibriumPoint((1.0, 1.0), 0.0, "newton"),
    ]
    out = dedupe(pts)
    assert _locs(out) == [(0.0, 0.0), (1.0, 1.0)]


def test_dedupe_loose_radius_for_degenerate():
    pts = [
        EquilibriumPoint((0.0, 5e-5), 1e-11, "newton", degenerate=True),
        EquilibriumPoint((0.0, -5e-5), 1e-12, "newton"),
    ]
    out = dedupe(pts)
    assert len(out) == 1 and out[0].degenerate


def test_find_rejects_bad_arguments():
    m = make_model("normal2d", {"a": 1.0})
    with pytest.raises(ValueError):
        find_equilibria(m, Box.square(0, 1, dim=1))
    with pytest.raises(ValueError):
        find_equilibria(m, Box.square(0, 1), grid_per_axis=1)
