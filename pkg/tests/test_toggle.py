import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pitchfork.fields import Box, jacobian_fd, make_model
from pitchfork.toggle import (
    correspondence_residual,
    taylor_coefficients,
    taylor_field,
    unique_equilibrium_check,
)


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 3.0, 4.5])
def test_first_derivatives_match_fd(m):
    c = taylor_coefficients(m)
    jac = jacobian_fd(make_model("toggle-sym", {"m": m}), (1.0, 1.0))
    assert np.allclose(jac, [[c.f_x, c.f_y], [c.g_x, c.g_y]], atol=1e-8)


@pytest.mark.parametrize("m", [1.0, 2.0, 3.0])
def test_second_derivative_matches_fd(m):
    model = make_model("toggle-sym", {"m": m})
    h = 1e-4
    f = lambda y: model.rhs((1.0, y))[0]
    fyy = (f(1 + h) - 2 * f(1.0) + f(1 - h)) / h**2
    assert fyy == pytest.approx(taylor_coefficients(m).f_yy, rel=1e-5)


@pytest.mark.parametrize("m", [1.5, 2.0, 3.0])
def test_taylor_polynomial_is_third_order(m):
    # halving the offset divides the error by 8 or more (m = 2 also kills the cubic term)
    model = make_model("toggle-sym", {"m": m})
    c = taylor_coefficients(m)
    errs = []
    for h in (0.04, 0.02, 0.01):
        exact = model.rhs((1 + h, 1 + h))
        approx = c.second_order(1 + h, 1 + h)
        errs.append(max(abs(e - p) for e, p in zip(exact, approx)))
    for e1, e2 in zip(errs, errs[1:]):
        assert e1 / e2 > 6.0


@pytest.mark.parametrize("m", [1.0, 2.0, 3.0])
def test_surrogate_gap_is_second_order(m):
    # the surrogate's quadratic coefficient is twice the Taylor one, so it
    # departs from the toggle by m/4 h^2 along the diagonal
    model = make_model("toggle-sym", {"m": m})
    sur = taylor_field(m)
    for h in (0.01, 0.005):
        gap = sur.rhs((1 + h, 1 + h))[0] - model.rhs((1 + h, 1 + h))[0]
        assert gap == pytest.approx(m / 4 * h * h, rel=0.1)


def test_surrogate_shares_linear_part():
    for m in (1.0, 2.0, 3.0):
        a = make_model("toggle-sym", {"m": m}).jacobian((1.0, 1.0))
        b = taylor_field(m).jacobian((1.0, 1.0))
        assert np.allclose(a, b)


def test_correspondence_exact_at_m2():
    assert correspondence_residual(Box.square(-1.0, 1.0), 21) <= 1e-12
    assert correspondence_residual(Box.square(-10.0, 10.0), 41) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-3.0, 3.0).filter(lambda v: abs(v - 1.0) > 1e-3))
def test_correspondence_only_at_a_one(a):
    assert correspondence_residual(Box.square(-1.0, 1.0), 11, m=2.0, a=a) > 1e-6


def test_uniqueness():
    assert [unique_equilibrium_check(m) for m in (0.5, 1.0, 2.0, 3.0)] == [True, True, True, False]


def test_rejects_negative_m():
    with pytest.raises(ValueError):
        taylor_coefficients(-1.0)
    with pytest.raises(ValueError):
        correspondence_residual(Box.square(-1.0, 1.0), 1)
