import math

import numpy as np
import pytest

from curvspace.curve import end_frame, in_bounds
from curvspace.dubins import (
    Unreachable,
    candidates,
    dubins_csc_oracle,
    dubins_shortest,
    mod2pi,
    word_of,
)
from curvspace.geom import Frame, frame_distance, frame_mul
from strategies import condensed_curve


def test_mod2pi_range():
    assert mod2pi(-0.5) == pytest.approx(2 * math.pi - 0.5)
    assert mod2pi(2 * math.pi) == pytest.approx(0.0, abs=1e-12)


def test_straight_ahead_is_a_segment():
    c = dubins_shortest(Frame(2.0))
    assert c.length == pytest.approx(2.0)
    assert word_of(c) == "S"


def test_quarter_turn_is_a_single_arc():
    c = dubins_csc_oracle(Frame(1 + 1j, 1j))
    assert c.length == pytest.approx(math.pi / 2)
    assert frame_distance(end_frame(c), Frame(1 + 1j, 1j)) < 1e-9


def test_candidates_hit_the_target():
    target = Frame.from_angle(3 - 2j, 2.0)
    found = candidates(target, 1.0)
    assert found
    for cand in found:
        assert frame_distance(end_frame(cand.curve), target) < 1e-9
        assert in_bounds(cand.curve, -1.0, 1.0, "closed")


def test_shortest_is_no_longer_than_any_candidate():
    target = Frame.from_angle(-1 + 0.5j, -2.5)
    best = dubins_shortest(target)
    assert all(best.length <= cand.length + 1e-12 for cand in candidates(target, 1.0))


def test_start_frame_is_respected():
    start = Frame.from_angle(1 - 1j, 0.4)
    local = Frame.from_angle(4 + 1j, 0.3)
    target = frame_mul(start, local)
    moved = dubins_shortest(target, start=start)
    direct = dubins_shortest(local)
    assert moved.length == pytest.approx(direct.length)
    assert frame_distance(end_frame(moved), target) < 1e-9


def test_smaller_bound_gives_longer_paths():
    target = Frame.from_angle(1 + 2j, 1.0)
    assert dubins_shortest(target, 0.5).length >= dubins_shortest(target, 1.0).length


def test_csc_oracle_only_uses_short_arcs():
    target = Frame.from_angle(0.2 + 0.1j, math.pi - 0.1)
    try:
        c = dubins_csc_oracle(target)
    except Unreachable:
        return
    assert all(abs(seg.turning) < math.pi for seg in c.segs if seg.kappa != 0.0)
    assert frame_distance(end_frame(c), target) < 1e-9


def test_bound_must_be_positive():
    with pytest.raises(ValueError):
        dubins_shortest(Frame(1.0), 0.0)


def test_shortest_beats_random_bounded_curves():
    rng = np.random.default_rng(5)
    for _ in range(20):
        c = condensed_curve(rng)
        assert dubins_shortest(end_frame(c)).length <= c.length + 1e-9
