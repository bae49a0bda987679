from __future__ import annotations

import cmath
import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .components import ComponentReport, component_count
from .geom import Frame, wrap_angle
from .normalize import Bounds

logger = logging.getLogger(__name__)

SURFACE_KINDS = ("plane", "cylinder", "torus", "mobius", "klein")
_KEY_DIGITS = 9


class AsymmetricBoundsOnNonorientable(ValueError):
    pass


@dataclass(frozen=True)
class DeckMotion:
    """Isometry x -> shift + rotation * x, or shift + rotation * conj(x) when reflecting."""

    shift: complex
    rotation: complex = 1 + 0j
    reflect: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "shift", complex(self.shift))
        rotation = complex(self.rotation)
        if abs(abs(rotation) - 1.0) > 1e-12:
            raise ValueError(f"rotation must be a unit complex number, got {rotation}")
        object.__setattr__(self, "rotation", rotation)

    def apply(self, x: complex) -> complex:
        return self.shift + self.rotation * (x.conjugate() if self.reflect else x)

    def apply_frame(self, f: Frame) -> Frame:
        heading = f.w.conjugate() if self.reflect else f.w
        return Frame(self.apply(f.p), self.rotation * heading)

    def compose(self, other: "DeckMotion") -> "DeckMotion":
        """self after other."""
        inner_shift = other.shift.conjugate() if self.reflect else other.shift
        inner_rot = other.rotation.conjugate() if self.reflect else other.rotation
        return DeckMotion(
            self.shift + self.rotation * inner_shift,
            self.rotation * inner_rot,
            self.reflect != other.reflect,
        )

    def inverse(self) -> "DeckMotion":
        if self.reflect:
            return DeckMotion(-self.rotation * self.shift.conjugate(), self.rotation, True)
        back = self.rotation.conjugate()
        return DeckMotion(-back * self.shift, back, False)


IDENTITY = DeckMotion(0j)


@dataclass(frozen=True)
class SurfaceModel:
    kind: str
    generators: Tuple[DeckMotion, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in SURFACE_KINDS:
            raise ValueError(f"unknown surface kind: {self.kind}")
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.shift == 0:
                raise ValueError(f"deck generator {g} has a fixed point")

    @property
    def orientable(self) -> bool:
        return not any(g.reflect for g in self.generators)

    @classmethod
    def plane(cls) -> "SurfaceModel":
        return cls("plane")

    @classmethod
    def cylinder(cls, period: complex = 3.0) -> "SurfaceModel":
        return cls("cylinder", (DeckMotion(period),))

    @classmethod
    def torus(cls, a: complex = 4.0, b: complex = 4j) -> "SurfaceModel":
        if abs((a.conjugate() * complex(b)).imag) < 1e-12:
            raise ValueError("torus periods must be linearly independent")
        return cls("torus", (DeckMotion(a), DeckMotion(b)))

    @classmethod
    def mobius(cls, period: float = 3.0) -> "SurfaceModel":
        # glide reflection along the real axis
        return cls("mobius", (DeckMotion(period, 1.0, True),))

    @classmethod
    def klein(cls, period: float = 3.0, height: float = 3.0) -> "SurfaceModel":
        return cls("klein", (DeckMotion(period, 1.0, True), DeckMotion(1j * height)))

    @classmethod
    def build(cls, kind: str, periods: Tuple[complex, ...] = ()) -> "SurfaceModel":
        if kind == "plane":
            return cls.plane()
        if kind == "cylinder":
            return cls.cylinder(*periods[:1])
        if kind == "torus":
            return cls.torus(*periods[:2])
        if kind == "mobius":
            return cls.mobius(*(p.real for p in periods[:1]))
        if kind == "klein":
            return cls.klein(*(p.real if i == 0 else p.imag for i, p in enumerate(periods[:2])))
        raise ValueError(f"unknown surface kind: {kind}")


def _key(f: Frame) -> Tuple[float, float, float, float]:
    return (
        round(f.p.real, _KEY_DIGITS),
        round(f.p.imag, _KEY_DIGITS),
        round(f.w.real, _KEY_DIGITS),
        round(f.w.imag, _KEY_DIGITS),
    )


def _motion_key(g: DeckMotion) -> Tuple[float, float, float, float, bool]:
    return (
        round(g.shift.real, _KEY_DIGITS),
        round(g.shift.imag, _KEY_DIGITS),
        round(g.rotation.real, _KEY_DIGITS),
        round(g.rotation.imag, _KEY_DIGITS),
        g.reflect,
    )


def lifts(S: SurfaceModel, base: Frame, v: Frame, max_radius: float) -> List[Frame]:
    """Deck-orbit images of v whose position lies within max_radius of base."""
    if max_radius < 0:
        raise ValueError("max_radius must be non-negative")
    steps = [g for gen in S.generators for g in (gen, gen.inverse())]
    margin = max((abs(g.shift) for g in steps), default=0.0)
    if not S.orientable:
        # a reflection moves points by up to twice their distance from its axis
        margin += 2.0 * (max_radius + abs(base.p) + abs(v.p))
    images: Dict[Tuple[float, float, float, float], Frame] = {_key(v): v}
    visited = {_motion_key(IDENTITY)}
    queue = deque([IDENTITY])
    while queue:
        element = queue.popleft()
        for step in steps:
            candidate = step.compose(element)
            marker = _motion_key(candidate)
            if marker in visited:
                continue
            image = candidate.apply_frame(v)
            if abs(image.p - base.p) > max_radius + margin:
                continue
            visited.add(marker)
            queue.append(candidate)
            images.setdefault(_key(image), image)
    found = [f for f in images.values() if abs(f.p - base.p) <= max_radius + 1e-12]
    found.sort(key=lambda f: (round(abs(f.p - base.p), _KEY_DIGITS), _key(f)))
    logger.debug("%s: %d lifts within radius %g", S.kind, len(found), max_radius)
    return found


def default_max_radius(u: Frame, v: Frame, b: Bounds) -> float:
    scales = [abs(k) for k in (b.kappa1, b.kappa2, 1.0) if k != 0.0 and math.isfinite(k)]
    return abs(v.p - u.p) + 8.0 * math.pi / min(scales)


def _lift_turning(u: Frame, lift: Frame, theta1: Optional[float]) -> float:
    principal = wrap_angle(cmath.phase(lift.w * u.w.conjugate()))
    if theta1 is None:
        return principal
    turns = round((theta1 - principal) / (2.0 * math.pi))
    return principal + 2.0 * math.pi * turns


def surface_components(
    S: SurfaceModel,
    u: Frame,
    v: Frame,
    b: Bounds,
    theta1: Optional[float] = None,
    max_radius: Optional[float] = None,
    variant: str = "open",
) -> List[Tuple[Frame, ComponentReport]]:
    """Component reports of the curve space on S, one per lift of v."""
    if not S.orientable and not b.symmetric:
        raise AsymmetricBoundsOnNonorientable(
            f"{S.kind} needs symmetric bounds, got ({b.kappa1}, {b.kappa2})"
        )
    radius = default_max_radius(u, v, b) if max_radius is None else max_radius
    reports = []
    for lift in lifts(S, u, v, radius):
        reports.append((lift, component_count(u, lift, b, _lift_turning(u, lift, theta1), variant)))
    return reports
