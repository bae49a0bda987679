import math

import numpy as np
import pytest
from hypothesis import given, settings

from curvspace.curve import OutOfBounds, PiecewiseCurve, end_frame, turning_profile
from curvspace.dubins import Unreachable, dubins_csc_oracle
from curvspace.excavator import (
    Excavator,
    NotCondensed,
    dubins_condensed,
    excavator_trace,
    sine_of_slope,
    slope_of_sine,
)
from curvspace.geom import Frame, frame_distance
from strategies import condensed_curve, long_condensed_curves


@pytest.fixture
def s_curve():
    return PiecewiseCurve.from_pairs([(0.8, 0.4), (-0.8, 0.4)])


def test_slope_and_sine_are_inverse():
    S = np.linspace(-0.99, 0.99, 41)
    np.testing.assert_allclose(sine_of_slope(slope_of_sine(S)), S, atol=1e-12)
    assert slope_of_sine(np.array([1.0]))[0] == math.inf
    assert sine_of_slope(np.array([-math.inf]))[0] == -1.0


def test_identity_and_limit_keep_the_end_frame(s_curve):
    excavator = Excavator(s_curve, 1.0)
    target = end_frame(s_curve)
    assert frame_distance(excavator.step(1.0).end_frame(), target) < 1e-4
    assert frame_distance(excavator.step(0.0).end_frame(), target) < 1e-4


def test_identity_step_reproduces_the_length(s_curve):
    assert Excavator(s_curve, 1.0).step(1.0).length == pytest.approx(s_curve.length, abs=1e-6)


def test_limit_is_the_shortest_condensed_curve(s_curve):
    target = end_frame(s_curve)
    shortest = dubins_condensed(target, 1.0)
    limit = Excavator(s_curve, 1.0).step(0.0)
    assert limit.length == pytest.approx(shortest.length, abs=1e-5)
    assert shortest.length <= s_curve.length + 1e-9
    assert frame_distance(end_frame(shortest), target) < 1e-6


def test_trace_shrinks_monotonically(s_curve):
    trace = excavator_trace(s_curve, 1.0, n_steps=8)
    omegas = np.array([d.omega for d in trace.diagnostics])
    lengths = np.array([d.length for d in trace.diagnostics])
    assert np.all(np.diff(omegas) >= -1e-12)
    assert np.all(np.diff(lengths) >= -1e-12)
    assert trace.end_drift() < 1e-4
    assert max(d.max_kappa for d in trace.diagnostics) <= 1.0 + 1e-6


def test_area_is_conserved(s_curve):
    excavator = Excavator(s_curve, 1.0)
    a1 = excavator.state.a1
    for s in (0.0, 0.25, 0.5, 0.75, 1.0):
        assert abs(excavator.step(s).area - a1) <= 1e-8 * (1.0 + abs(a1))


def test_piecewise_rendering_matches_the_samples(s_curve):
    step = Excavator(s_curve, 1.0, grid_points=512).step(0.5)
    rebuilt = step.to_piecewise()
    assert max(abs(k) for k in rebuilt.curvatures) <= 1.0 + 1e-6
    assert frame_distance(end_frame(rebuilt), step.end_frame()) < 1e-4


def test_rejects_diffuse_and_out_of_bounds_curves():
    with pytest.raises(NotCondensed):
        Excavator(PiecewiseCurve.from_pairs([(1.0, 1.5 * math.pi)]), 1.0)
    with pytest.raises(OutOfBounds):
        Excavator(PiecewiseCurve.from_pairs([(2.0, 0.5)]), 1.0)
    with pytest.raises(ValueError):
        Excavator(PiecewiseCurve.from_pairs([(0.5, 0.5)]), 1.0).step(1.5)


def test_condensed_dubins_agrees_with_csc_oracle():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(20):
        c = condensed_curve(rng)
        target = end_frame(c)
        try:
            shortest = dubins_condensed(target, 1.0)
            oracle = dubins_csc_oracle(target, 1.0)
        except Unreachable:
            continue
        checked += 1
        assert shortest.length == pytest.approx(oracle.length, abs=1e-6)
        assert turning_profile(shortest).omega < math.pi
    assert checked > 0


def test_condensed_dubins_rejects_half_turns():
    with pytest.raises(Unreachable):
        dubins_condensed(Frame(1.0, -1.0))


@pytest.mark.parametrize(
    "q, theta",
    [(3.0, 0.0), (5.0, 0.0), (10.0, 0.0), (4 + 2j, 0.5), (6 + 1j, -0.3), (2 + 3j, 1.0)],
)
def test_condensed_dubins_reaches_far_targets(q, theta):
    target = Frame.from_angle(q, theta)
    shortest = dubins_condensed(target, 1.0)
    oracle = dubins_csc_oracle(target, 1.0)
    assert frame_distance(end_frame(shortest), target) < 1e-6
    assert shortest.length == pytest.approx(oracle.length, abs=1e-6)
    assert turning_profile(shortest).omega < math.pi


def test_straight_target_gives_the_segment():
    shortest = dubins_condensed(Frame(5.0), 1.0)
    assert shortest.length == pytest.approx(5.0, abs=1e-9)
    assert frame_distance(end_frame(shortest), Frame(5.0)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(long_condensed_curves())
def test_condensed_dubins_on_long_curves(c):
    target = end_frame(c)
    shortest = dubins_condensed(target, 1.0)
    assert frame_distance(end_frame(shortest), target) < 1e-6
    assert shortest.length <= c.length + 1e-9
    assert dubins_csc_oracle(target, 1.0).length <= shortest.length + 1e-6


def test_excavator_limit_on_a_long_curve():
    c = PiecewiseCurve.from_pairs([(0.6, 0.8), (0.0, 6.0), (-0.9, 0.7)])
    limit = Excavator(c, 1.0).step(0.0)
    assert limit.length == pytest.approx(dubins_condensed(end_frame(c), 1.0).length, abs=1e-4)
    assert frame_distance(limit.end_frame(), end_frame(c)) < 1e-4


def test_sampled_long_curves_are_solved():
    rng = np.random.default_rng(5)
    for _ in range(10):
        c = condensed_curve(rng, max_seg_len=6.0)
        shortest = dubins_condensed(end_frame(c), 1.0)
        assert shortest.length <= c.length + 1e-9
