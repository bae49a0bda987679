import math

import numpy as np
import pytest

from curvspace.curve import (
    CurveClass,
    FrameMismatch,
    PiecewiseCurve,
    end_frame,
    heading_at,
    in_bounds,
    turning_profile,
)
from curvspace.deform import (
    BadWindow,
    LoopEight,
    NotApplicable,
    NotDiffuse,
    NotLocallyConvex,
    PairingViolation,
    TurningMismatch,
    attach_eight,
    bridge_endpoints,
    eight,
    eight_same_component,
    find_antipodal_pairs,
    graft,
    locally_convex_homotopy,
    loop,
    spread_eights,
    spread_loops,
)
from curvspace.geom import ORIGIN, frame_distance
from curvspace.normalize import Bounds

THREE_QUARTERS = PiecewiseCurve.from_pairs([(1.0, 1.5 * math.pi)])


def test_loops_and_eights_close_up():
    assert frame_distance(end_frame(loop(2)), ORIGIN) < 1e-12
    assert frame_distance(end_frame(eight(3)), ORIGIN) < 1e-12
    assert turning_profile(loop(2)).theta1 == pytest.approx(4 * math.pi)
    assert turning_profile(eight(3)).theta1 == pytest.approx(0.0, abs=1e-12)
    assert LoopEight("loop", 3).turning == pytest.approx(6 * math.pi)
    with pytest.raises(ValueError):
        LoopEight("spiral", 1)
    with pytest.raises(ValueError):
        LoopEight("eight", 0)


def test_attached_eight_makes_a_segment_diffuse(segment):
    base = segment(5.0)
    with_eight = attach_eight(base, 1)
    profile = turning_profile(with_eight)
    assert profile.theta1 == pytest.approx(0.0, abs=1e-12)
    assert profile.curve_class == CurveClass.DIFFUSE
    assert frame_distance(end_frame(with_eight), end_frame(base)) < 1e-9
    assert in_bounds(with_eight, -1.0, 1.0)


def test_attached_loops_add_full_turns(segment):
    looped = attach_eight(segment(5.0), 2, kind="loop")
    assert turning_profile(looped).theta1 == pytest.approx(4 * math.pi)
    assert frame_distance(end_frame(looped), end_frame(segment(5.0))) < 1e-9


def test_window_must_fit(segment):
    with pytest.raises(BadWindow):
        attach_eight(segment(5.0), 1, t0=0.1, eps=0.1)


def test_spread_eights_flatten_towards_half_curvature(segment):
    base = segment(10.0)
    coarse = spread_eights(base, 25)
    fine = spread_eights(base, 50)

    def error(sampled):
        return float(np.max(np.abs(np.abs(sampled.curvature) - 0.5)))

    assert error(fine) < error(coarse)
    assert error(fine) < 0.2
    assert frame_distance(fine.end, end_frame(base)) < 1e-6
    assert frame_distance(fine.start, base.start) < 1e-12


def test_spread_loops_wind_n_times(segment):
    base = segment(10.0)
    sampled = spread_loops(base, 10)
    turning = float(sampled.headings[-1] - sampled.headings[0])
    assert turning == pytest.approx(20 * math.pi, abs=1e-6)
    assert frame_distance(sampled.end, end_frame(base)) < 1e-6


def test_spreading_needs_positive_count(segment):
    with pytest.raises(ValueError):
        spread_eights(segment(1.0), 0)


def test_bridge_endpoints_agree(segment):
    attached, spread = bridge_endpoints(segment(10.0), 10)
    assert frame_distance(end_frame(attached), spread.end) < 1e-6


def test_antipodal_pairs_of_three_quarter_arc():
    pairs = find_antipodal_pairs(THREE_QUARTERS)
    assert pairs
    for s, t in pairs:
        assert abs(heading_at(THREE_QUARTERS, t) - heading_at(THREE_QUARTERS, s)) == pytest.approx(math.pi)


def test_antipodal_pairs_need_a_diffuse_curve(segment):
    with pytest.raises(NotDiffuse):
        find_antipodal_pairs(segment(1.0))


def test_graft_at_antipodal_points_keeps_the_end():
    s, t = find_antipodal_pairs(THREE_QUARTERS)[0]
    grafted = graft(THREE_QUARTERS, [(s, 2.0), (t, 2.0)], [1, 0])
    assert grafted.length == pytest.approx(THREE_QUARTERS.length + 4.0)
    assert frame_distance(end_frame(grafted), end_frame(THREE_QUARTERS)) < 1e-9
    assert turning_profile(grafted).theta1 == pytest.approx(1.5 * math.pi)


def test_graft_rejects_bad_pairings():
    with pytest.raises(PairingViolation):
        graft(THREE_QUARTERS, [(0.0, 2.0), (1.0, 2.0)], [1, 0])
    with pytest.raises(PairingViolation):
        graft(THREE_QUARTERS, [(0.0, 2.0), (math.pi, 1.0)], [1, 0])
    with pytest.raises(PairingViolation):
        graft(THREE_QUARTERS, [(0.0, 2.0)], [1])


def _bumped_quarter():
    """A locally convex quarter turn ending at (1 + i, i) with a flatter middle."""
    b = 2.0
    a = (math.sqrt(2) - 2 * b * math.sin(math.pi / 12)) / (math.sqrt(2) - 2 * math.sin(math.pi / 12))
    sixth = math.pi / 6
    return PiecewiseCurve.from_pairs([(1 / a, a * sixth), (1 / b, b * sixth), (1 / a, a * sixth)])


def test_convex_homotopy_keeps_the_end_frame():
    quarter = PiecewiseCurve.from_pairs([(1.0, math.pi / 2)])
    bumped = _bumped_quarter()
    assert frame_distance(end_frame(bumped), end_frame(quarter)) < 1e-9
    trace = locally_convex_homotopy(quarter, bumped, n_steps=8)
    assert len(trace.curves) == 9
    assert trace.end_drift() < 1e-9
    assert trace.theta1_drift() < 1e-12
    for c in trace.curves:
        assert all(k > 0 for k in c.curvatures)
    assert trace.curves[0].length == pytest.approx(quarter.length)
    assert trace.curves[-1].length == pytest.approx(bumped.length)


def test_convex_homotopy_rejects_bad_inputs(segment):
    quarter = PiecewiseCurve.from_pairs([(1.0, math.pi / 2)])
    with pytest.raises(NotLocallyConvex):
        locally_convex_homotopy(quarter, segment(1.0))
    with pytest.raises(FrameMismatch):
        locally_convex_homotopy(quarter, PiecewiseCurve.from_pairs([(2.0, math.pi / 4)]))
    with pytest.raises(TurningMismatch):
        locally_convex_homotopy(
            PiecewiseCurve.from_pairs([(1.0, 2 * math.pi)]),
            PiecewiseCurve.from_pairs([(1.0, 4 * math.pi)]),
        )


@pytest.mark.parametrize("length, expected", [(5.0, True), (3.0, False)])
def test_eight_test_follows_the_disconnection_threshold(segment, length, expected):
    assert eight_same_component(segment(length), Bounds(-1.0, 1.0)) is expected


def test_diffuse_curves_always_absorb_eights():
    assert eight_same_component(THREE_QUARTERS, Bounds(-2.0, 2.0)) is True


def test_eight_test_needs_both_signs(segment):
    with pytest.raises(NotApplicable):
        eight_same_component(segment(1.0), Bounds(0.0, 2.0))
