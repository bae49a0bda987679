import math

import pytest

from curvspace.geom import ORIGIN, Frame, frame_distance
from curvspace.normalize import Bounds
from curvspace.surfaces import (
    IDENTITY,
    AsymmetricBoundsOnNonorientable,
    DeckMotion,
    SurfaceModel,
    default_max_radius,
    lifts,
    surface_components,
)

SYMMETRIC = Bounds(-1.0, 1.0)


def test_deck_motions_compose_and_invert():
    glide = DeckMotion(3.0, 1.0, True)
    shift = DeckMotion(2j)
    both = glide.compose(shift)
    x = 0.7 - 0.4j
    assert both.apply(x) == pytest.approx(glide.apply(shift.apply(x)))
    for g in (glide, shift, both):
        assert g.inverse().compose(g).apply(x) == pytest.approx(x)
    assert IDENTITY.apply(x) == x


def test_deck_rotation_must_be_unit():
    with pytest.raises(ValueError):
        DeckMotion(1.0, 2.0)


def test_reflections_conjugate_headings():
    glide = DeckMotion(3.0, 1.0, True)
    moved = glide.apply_frame(Frame.from_angle(1j, 0.5))
    assert moved.p == pytest.approx(3 - 1j)
    assert moved.theta == pytest.approx(-0.5)


def test_surface_factories():
    assert SurfaceModel.plane().orientable
    assert SurfaceModel.torus().orientable
    assert not SurfaceModel.mobius().orientable
    assert not SurfaceModel.klein().orientable
    assert SurfaceModel.build("cylinder", (5.0,)).generators[0].shift == 5.0
    with pytest.raises(ValueError):
        SurfaceModel.build("sphere")
    with pytest.raises(ValueError):
        SurfaceModel.torus(1.0, 2.0)


def test_plane_has_a_single_lift():
    found = lifts(SurfaceModel.plane(), ORIGIN, Frame(3.0), 100.0)
    assert len(found) == 1


def test_cylinder_lifts_are_translates():
    found = lifts(SurfaceModel.cylinder(3.0), ORIGIN, ORIGIN, 7.0)
    xs = sorted(round(f.p.real, 9) for f in found)
    assert xs == [-6.0, -3.0, 0.0, 3.0, 6.0]
    assert found[0].p == 0


def test_torus_lifts_match_the_lattice():
    radius = 10.0
    found = lifts(SurfaceModel.torus(4.0, 4j), ORIGIN, ORIGIN, radius)
    lattice = [complex(4 * m, 4 * n) for m in range(-3, 4) for n in range(-3, 4)]
    assert len(found) == sum(1 for z in lattice if abs(z) <= radius)


def test_klein_bottle_has_reflected_lifts():
    base = Frame.from_angle(0.3 + 0.2j, 0.8)
    found = lifts(SurfaceModel.klein(3.0, 3.0), ORIGIN, base, 6.0)
    reflected = [f for f in found if abs(f.w - base.w.conjugate()) < 1e-9]
    assert reflected
    assert any(frame_distance(f, base) < 1e-12 for f in found)


def test_cylinder_components_per_lift():
    reports = surface_components(SurfaceModel.cylinder(3.0), ORIGIN, ORIGIN, SYMMETRIC, theta1=0.0, max_radius=7.0)
    counts = {round(lift.p.real, 9): report.count for lift, report in reports}
    assert counts[3.0] == 2
    assert counts[6.0] == 1


def test_nonorientable_surfaces_need_symmetric_bounds():
    with pytest.raises(AsymmetricBoundsOnNonorientable):
        surface_components(SurfaceModel.mobius(), ORIGIN, Frame(1.0), Bounds(-1.0, 0.5))


def test_default_radius_grows_with_the_bound():
    near = default_max_radius(ORIGIN, Frame(1.0), Bounds(-1.0, 1.0))
    far = default_max_radius(ORIGIN, Frame(1.0), Bounds(-0.25, 0.25))
    assert far > near
    assert near == pytest.approx(1.0 + 8.0 * math.pi)
