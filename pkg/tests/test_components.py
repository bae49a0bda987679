import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from curvspace.components import (
    CONDENSED_COMPONENT,
    DIFFUSE_COMPONENT,
    TurningIncompatible,
    component_count,
    convex_witness,
    same_component,
)
from curvspace.curve import InvalidBounds, OutOfBounds, PiecewiseCurve, end_frame
from curvspace.deform import attach_eight
from curvspace.geom import ORIGIN, Frame, frame_distance, wrap_angle
from curvspace.normalize import Bounds, CanonicalType
from strategies import finite_bounds, frames

SYMMETRIC = Bounds(-1.0, 1.0)


@pytest.mark.parametrize(
    "x, variant, count",
    [(3.0, "open", 2), (4.0, "open", 2), (4.0, "closed", 1), (5.0, "open", 1), (0.5, "closed", 2)],
)
def test_straight_targets_split_below_four(x, variant, count):
    report = component_count(ORIGIN, Frame(x), SYMMETRIC, 0.0, variant)
    assert report.mode == "fixed_turning"
    assert report.count == count


def test_split_reports_name_both_components():
    report = component_count(ORIGIN, Frame(3.0), SYMMETRIC, 0.0)
    assert report.labels == (CONDENSED_COMPONENT, DIFFUSE_COMPONENT)
    assert report.q_hat.p == pytest.approx(3.0)
    assert report.canonical.canonical_type == CanonicalType.SYMMETRIC


def test_other_turnings_are_connected():
    report = component_count(ORIGIN, Frame(3.0), SYMMETRIC, 2 * math.pi)
    assert report.count == 1


def test_half_turn_is_flagged():
    report = component_count(ORIGIN, Frame(3.0, -1.0), SYMMETRIC, math.pi)
    assert report.count == 1
    assert report.remark_based


def test_scaled_bounds_use_the_normalized_target():
    # (-2, 2) doubles every distance, so 1.5 behaves like 3 and 2.5 like 5
    assert component_count(ORIGIN, Frame(1.5), Bounds(-2.0, 2.0), 0.0).count == 2
    assert component_count(ORIGIN, Frame(2.5), Bounds(-2.0, 2.0), 0.0).count == 1


def test_unconstrained_space_is_connected():
    report = component_count(ORIGIN, Frame(3.0), Bounds(-math.inf, math.inf), 0.0)
    assert report.mode == "per_turning"
    assert report.count == 1


def test_positive_bounds_forbid_negative_turning():
    report = component_count(ORIGIN, Frame(3.0), Bounds(0.0, math.inf), -2 * math.pi)
    assert report.mode == "per_turning"
    assert report.count == 0


def test_positive_bounds_with_a_witness():
    target = Frame(1 + 1j, 1j)
    report = component_count(ORIGIN, target, Bounds(0.0, math.inf), math.pi / 2)
    assert report.count == 1
    (witness,) = report.witnesses
    assert all(k > 0 for k in witness.curvatures)
    assert frame_distance(end_frame(witness), target) < 1e-8


def test_shifted_bounds_with_a_witness():
    target = Frame(0.5 + 0.5j, 1j)
    report = component_count(ORIGIN, target, Bounds(1.0, math.inf), math.pi / 2)
    assert report.count == 1
    (witness,) = report.witnesses
    assert all(k > 1 for k in witness.curvatures)


def test_convex_witness_needs_positive_turning():
    assert convex_witness(1 + 1j, 0.0, CanonicalType.HALF_LINE) is None
    with pytest.raises(ValueError):
        convex_witness(1 + 1j, 1.0, CanonicalType.SYMMETRIC)


def test_turning_must_match_the_headings():
    with pytest.raises(TurningIncompatible):
        component_count(ORIGIN, Frame(3.0), SYMMETRIC, 1.0)


def test_closed_variant_needs_finite_bounds():
    with pytest.raises(InvalidBounds):
        component_count(ORIGIN, Frame(3.0), Bounds(0.0, math.inf), 0.0, "closed")


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(["a", "b", "c", "d", "e"]).flatmap(lambda case: finite_bounds(case)),
    frames(scale=2.0),
    frames(scale=2.0),
)
def test_count_survives_normalization(b, P, Q):
    theta1 = wrap_angle(cmath.phase(Q.w * P.w.conjugate()))
    report = component_count(P, Q, b, theta1)
    rec = report.canonical
    canonical = component_count(ORIGIN, rec.q0, rec.canonical_bounds, rec.turning_sign * theta1)
    assert canonical.count == report.count


def test_same_component_follows_the_threshold(segment):
    short = segment(3.0)
    long = segment(5.0)
    assert same_component(short, attach_eight(short, 1), SYMMETRIC) is False
    assert same_component(long, attach_eight(long, 1), SYMMETRIC) is True
    assert same_component(short, short, SYMMETRIC) is True


def test_eights_share_a_component(segment):
    short = segment(3.0)
    one = attach_eight(short, 1)
    two = attach_eight(short, 2, t0=0.7, eps=0.1)
    assert same_component(one, two, SYMMETRIC) is True


def test_different_turnings_are_different_components(segment):
    short = segment(3.0)
    looped = attach_eight(short, 1, kind="loop")
    shifted = attach_eight(short, 1, kind="loop", t0=0.3, eps=0.1)
    assert same_component(looped, shifted, SYMMETRIC) is True
    assert same_component(short, looped, SYMMETRIC) is False


def test_same_component_checks_its_inputs(segment):
    with pytest.raises(OutOfBounds):
        same_component(segment(3.0), segment(3.0), Bounds(0.5, 1.0))
    bent = PiecewiseCurve.from_pairs([(0.5, 1.0)])
    with pytest.raises(ValueError):
        same_component(segment(1.0), bent, SYMMETRIC)
