from __future__ import annotations

import cmath
import math
from dataclasses import dataclass


def _unit(w: complex) -> complex:
    size = abs(w)
    if size == 0.0:
        raise ValueError("direction must be nonzero")
    return w / size


@dataclass(frozen=True)
class Frame:
    """A point of the plane together with a unit heading.

    Frames double as proper Euclidean motions x -> p + w*x; the heading is
    renormalized on construction.
    """

    p: complex
    w: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", complex(self.p))
        object.__setattr__(self, "w", _unit(complex(self.w)))

    @classmethod
    def from_angle(cls, p: complex, theta: float) -> "Frame":
        return cls(p, cmath.exp(1j * theta))

    @property
    def theta(self) -> float:
        return cmath.phase(self.w)

    def conjugate(self) -> "Frame":
        return Frame(self.p.conjugate(), self.w.conjugate())

    def close_to(self, other: "Frame", tol: float = 1e-9) -> bool:
        return abs(self.p - other.p) <= tol and abs(self.w - other.w) <= tol


ORIGIN = Frame(0j, 1 + 0j)


def frame_mul(f: Frame, g: Frame) -> Frame:
    return Frame(f.p + f.w * g.p, f.w * g.w)


def frame_inv(f: Frame) -> Frame:
    wbar = f.w.conjugate()
    return Frame(-wbar * f.p, wbar)


def frame_apply(f: Frame, a: complex) -> complex:
    return f.p + f.w * a


def frame_distance(f: Frame, g: Frame) -> float:
    return max(abs(f.p - g.p), abs(f.w - g.w))


def inner(x: complex, y: complex) -> float:
    """Euclidean inner product of two points viewed as plane vectors."""
    return (x * y.conjugate()).real


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"circle radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", complex(self.center))

    def point(self, t: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * t)

    def distance(self, q: complex) -> float:
        return abs(abs(q - self.center) - self.radius)


@dataclass(frozen=True)
class HalfPlane:
    """Oriented line through ``anchor`` with unit ``direction``.

    ``side`` is +1 when the positive side is to the left of the direction,
    -1 when it is to the right.
    """

    anchor: complex
    direction: complex
    side: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "anchor", complex(self.anchor))
        object.__setattr__(self, "direction", _unit(complex(self.direction)))
        if self.side not in (1, -1):
            raise ValueError(f"side must be +1 or -1, got {self.side}")


def side_of_line(q: complex, hp: HalfPlane) -> float:
    return hp.side * inner(q - hp.anchor, 1j * hp.direction)


def ray_distance(q: complex, anchor: complex, direction: complex) -> float:
    along = inner(q - anchor, direction)
    if along <= 0.0:
        return abs(q - anchor)
    return abs(inner(q - anchor, 1j * direction))


def arc_distance(q: complex, circle: Circle, t_lo: float, t_hi: float) -> float:
    """Distance from q to the arc {center + r e^{it} : t in [t_lo, t_hi]}."""
    if t_hi < t_lo:
        t_lo, t_hi = t_hi, t_lo
    offset = q - circle.center
    if offset != 0:
        angle = cmath.phase(offset)
        # bring the angle into the window if one of its 2pi-translates lands there
        shifted = t_lo + math.fmod(angle - t_lo, 2.0 * math.pi)
        if shifted < t_lo:
            shifted += 2.0 * math.pi
        if shifted <= t_hi:
            return circle.distance(q)
    return min(abs(q - circle.point(t_lo)), abs(q - circle.point(t_hi)))


def sign(x: float) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def wrap_angle(theta: float) -> float:
    """Representative of theta in (-pi, pi]."""
    wrapped = math.remainder(theta, 2.0 * math.pi)
    if wrapped == -math.pi:
        return math.pi
    return wrapped
