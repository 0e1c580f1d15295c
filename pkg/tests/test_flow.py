import math

import numpy as np
import pytest

from pitchfork.fields import make_model
from pitchfork.flow import (
    converges_to,
    integrate,
    integrate_batch,
    probe_points,
    uniformity_probe,
)


def test_linear_decay_matches_exponential():
    # pitchfork1d with mu = -1 near 0 is close to x' = -x; use tiny amplitude
    m = make_model("pitchfork1d", {"mu": -1.0})
    traj = integrate(m, (1e-4,), 2.0, 0.01)
    assert traj.final[0] == pytest.approx(1e-4 * math.exp(-2.0), rel=1e-6)


def test_time_grid_lands_on_end():
    traj = integrate(make_model("normal2d", {"a": 0.5}), (0.1, 0.1), 1.005, 0.01)
    assert traj.times[-1] == 1.005
    assert len(traj.times) == len(traj.states)


def test_fourth_order():
    m = make_model("normal2d", {"a": 0.5})
    finals = [integrate(m, (0.3, 0.2), 1.0, h).final for h in (0.2, 0.1, 0.05, 0.025)]
    diffs = [np.max(np.abs(a - b)) for a, b in zip(finals, finals[1:])]
    for d1, d2 in zip(diffs, diffs[1:]):
        assert 16 / 3 <= d1 / d2 <= 48


def test_batch_matches_single():
    m = make_model("normal2d", {"a": 1.5})
    starts = np.array([[0.2, -0.3, 1.0], [0.1, 0.4, -0.2]])
    _, states, diverged = integrate_batch(m, starts, 3.0, 0.01)
    assert not diverged.any()
    for j in range(3):
        single = integrate(m, starts[:, j], 3.0, 0.01)
        assert np.allclose(states[-1, :, j], single.final, atol=1e-13)


def test_blow_up_is_flagged():
    m = make_model("normal2d", {"a": 0.5})
    traj = integrate(m, (5.0, 5.0), 10.0, 0.01)
    assert traj.diverged and traj.times[-1] < 10.0
    _, states, diverged = integrate_batch(m, np.array([[5.0, 0.1], [5.0, 0.1]]), 10.0, 0.01)
    assert diverged.tolist() == [True, False]
    assert np.isnan(states[-1, :, 0]).all()


def test_toggle_domain_exit_is_flagged():
    m = make_model("toggle-sym", {"m": 2.5})
    traj = integrate(m, (-0.99, 1.0), 5.0, 0.5)
    assert traj.diverged


def test_converges_to_sink():
    m = make_model("normal2d", {"a": 2.0})
    target = ((1 - math.sqrt(5)) / 2, (1 + math.sqrt(5)) / 2)
    res = converges_to(m, (-0.3, 1.0), target)
    assert res and res.hit_time is not None and 0 < res.hit_time < 200


def test_saddle_repels_off_diagonal_start():
    m = make_model("normal2d", {"a": 2.0})
    assert not converges_to(m, (0.05, -0.05), (0.0, 0.0))


def test_probe_points():
    pts = probe_points((1.0, 2.0), 0.5, 8)
    assert pts.shape == (2, 8)
    assert np.allclose(np.hypot(pts[0] - 1.0, pts[1] - 2.0), 0.5)
    assert probe_points((0.0,), 0.25, 16).tolist() == [[-0.25, 0.25]]


def test_uniformity_1d():
    good = uniformity_probe("pitchfork1d", {}, "mu", [-1.0, -0.5, -0.2], (0.0,), 0.3, tol=1e-3)
    assert good.verdict == "uniform" and good.sample_count == 2
    bad = uniformity_probe("pitchfork1d", {}, "mu", [-0.5, 0.2], (0.0,), 0.3, tol=1e-3)
    assert bad.verdict == "non-uniform"
    assert {p for p, _ in bad.failures} == {0.2}


def test_rejects_bad_step():
    with pytest.raises(ValueError):
        integrate(make_model("normal2d", {"a": 0.5}), (0.0, 0.0), 1.0, 0.0)


def test_weak_sink_at_the_bifurcation():
    # x' = -x^3 has x(t) = x0 / sqrt(1 + 2 x0^2 t): slower than any exponential
    m = make_model("pitchfork1d", {"mu": 0.0})
    x0, t = 0.1, 2000.0
    traj = integrate(m, (x0,), t, 0.05)
    assert traj.final[0] == pytest.approx(x0 / math.sqrt(1 + 2 * x0 * x0 * t), rel=1e-6)
    assert converges_to(m, (x0,), (0.0,), tol=0.05, t_max=t, dt=0.05)
    assert not converges_to(m, (x0,), (0.0,), tol=1e-3, t_max=t, dt=0.05)
