from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .curve import ArcSegment, PiecewiseCurve, reflect
from .geom import ORIGIN, Circle, Frame, HalfPlane, arc_distance, inner, ray_distance, sign

BOUNDARY_TOL = 1e-9
_RANGE_TOL = 1e-12
HALF_PI = 0.5 * math.pi


class DomainError(ValueError):
    pass


class ParameterOutOfRange(ValueError):
    pass


class RegionStatus(str, Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class RegionVerdict:
    status: RegionStatus
    boundary_tol: float = BOUNDARY_TOL

    def as_bool(self, variant: str = "open") -> bool:
        if variant == "open":
            return self.status is RegionStatus.INSIDE
        if variant == "closed":
            return self.status is not RegionStatus.OUTSIDE
        raise ValueError(f"unknown variant: {variant}")


@dataclass(frozen=True)
class SignString:
    signs: Tuple[int, ...]

    def __post_init__(self) -> None:
        signs = tuple(int(s) for s in self.signs)
        if len(signs) < 2:
            raise ValueError("a sign string has at least two entries")
        if any(s not in (1, -1) for s in signs):
            raise ValueError(f"sign string entries must be +1 or -1, got {signs}")
        if any(a == b for a, b in zip(signs, signs[1:])):
            raise ValueError(f"sign string must alternate, got {signs}")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def parse(cls, text: str) -> "SignString":
        table = {"+": 1, "-": -1}
        try:
            return cls(tuple(table[ch] for ch in text.strip()))
        except KeyError as exc:
            raise ValueError(f"invalid sign string: {text!r}") from exc

    @classmethod
    def alternating(cls, first: int, length: int) -> "SignString":
        return cls(tuple(first if j % 2 == 0 else -first for j in range(length)))

    @property
    def first(self) -> int:
        return self.signs[0]

    def __len__(self) -> int:
        return len(self.signs)

    def __neg__(self) -> "SignString":
        return SignString(tuple(-s for s in self.signs))

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)


@dataclass(frozen=True)
class Cap:
    """Convex set {x : <x - c, e^{it}> <= r for every t in [t_lo, t_hi]}.

    Its boundary is the arc c + r e^{it} over the window plus the two
    tangent rays leaving the arc endpoints.
    """

    center: complex
    radius: float
    t_lo: float
    t_hi: float

    def support(self, q: complex) -> float:
        offset = q - self.center
        best = max(
            inner(offset, cmath.exp(1j * self.t_lo)),
            inner(offset, cmath.exp(1j * self.t_hi)),
        )
        if offset != 0 and _angle_in_window(cmath.phase(offset), self.t_lo, self.t_hi):
            best = max(best, abs(offset))
        return best

    def margin(self, q: complex) -> float:
        return self.support(q) - self.radius

    def contains(self, q: complex) -> bool:
        return self.margin(q) <= 0.0

    @property
    def circle(self) -> Circle:
        return Circle(self.center, self.radius)

    def endpoint(self, t: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * t)

    def low_ray(self) -> HalfPlane:
        return HalfPlane(self.endpoint(self.t_lo), -1j * cmath.exp(1j * self.t_lo), 1)

    def high_ray(self) -> HalfPlane:
        return HalfPlane(self.endpoint(self.t_hi), 1j * cmath.exp(1j * self.t_hi), -1)

    def mirrored(self) -> "Cap":
        return Cap(self.center.conjugate(), self.radius, -self.t_hi, -self.t_lo)


def _angle_in_window(angle: float, lo: float, hi: float) -> bool:
    shifted = lo + math.fmod(angle - lo, 2.0 * math.pi)
    if shifted < lo:
        shifted += 2.0 * math.pi
    return shifted <= hi


@dataclass(frozen=True)
class RegionSpec:
    """Boundary data of a region together with the pockets it avoids.

    The region is the complement of the union of ``pockets``.  Each entry of
    ``half_planes`` is a boundary ray: it starts at the anchor, runs along the
    direction, and the region lies on its positive side.
    """

    arcs: Tuple[Tuple[Circle, Tuple[float, float]], ...]
    half_planes: Tuple[HalfPlane, ...]
    excluded_point: Optional[complex]
    pockets: Tuple[Cap, ...] = ()
    empty: bool = False

    def mirrored(self) -> "RegionSpec":
        return RegionSpec(
            arcs=tuple(
                (Circle(c.center.conjugate(), c.radius), (-hi, -lo)) for c, (lo, hi) in self.arcs
            ),
            half_planes=tuple(
                HalfPlane(h.anchor.conjugate(), h.direction.conjugate(), -h.side)
                for h in self.half_planes
            ),
            excluded_point=None if self.excluded_point is None else self.excluded_point.conjugate(),
            pockets=tuple(cap.mirrored() for cap in self.pockets),
            empty=self.empty,
        )

    def boundary_distance(self, q: complex) -> float:
        distances = [arc_distance(q, circle, lo, hi) for circle, (lo, hi) in self.arcs]
        distances.extend(ray_distance(q, h.anchor, h.direction) for h in self.half_planes)
        return min(distances) if distances else math.inf

    def verdict(self, q: complex, tol: float = BOUNDARY_TOL) -> RegionVerdict:
        if self.empty:
            return RegionVerdict(RegionStatus.OUTSIDE, tol)
        if self.boundary_distance(q) <= tol:
            return RegionVerdict(RegionStatus.BOUNDARY, tol)
        if any(cap.contains(q) for cap in self.pockets):
            return RegionVerdict(RegionStatus.OUTSIDE, tol)
        return RegionVerdict(RegionStatus.INSIDE, tol)


EMPTY_REGION = RegionSpec(arcs=(), half_planes=(), excluded_point=None, empty=True)


def condensed_region(theta1: float) -> RegionSpec:
    if abs(theta1) >= math.pi:
        return EMPTY_REGION
    if theta1 < 0:
        return condensed_region(-theta1).mirrored()
    z = cmath.exp(1j * theta1)
    lo, hi = theta1 - HALF_PI, HALF_PI
    upper = Cap(1j + 1j * z, 2.0, lo, hi)
    lower = Cap(-1j - 1j * z, 2.0, lo, hi)
    return RegionSpec(
        arcs=((upper.circle, (lo, hi)), (lower.circle, (lo, hi))),
        half_planes=(upper.high_ray(), lower.low_ray()),
        excluded_point=-1j + 1j * z,
        pockets=(upper, lower),
    )


def critical_center(theta1: float, sigma: SignString) -> complex:
    z = cmath.exp(1j * theta1)
    parity = -1 if (len(sigma) + 1) % 2 else 1
    return 1j * sigma.first * (1 + parity * z)


def critical_region(theta1: float, sigma: SignString) -> RegionSpec:
    _check_critical_theta(theta1)
    if theta1 < 0:
        return critical_region(-theta1, -sigma).mirrored()
    z = cmath.exp(1j * theta1)
    lo, hi = theta1 - HALF_PI, HALF_PI
    cap = Cap(critical_center(theta1, sigma), 2.0 * len(sigma), lo, hi)
    return RegionSpec(
        arcs=((cap.circle, (lo, hi)),),
        half_planes=(cap.low_ray(), cap.high_ray()),
        excluded_point=-1j + 1j * z,
        pockets=(cap,),
    )


def _check_critical_theta(theta1: float) -> None:
    if abs(theta1) > math.pi + _RANGE_TOL:
        raise DomainError(f"critical regions need |theta1| <= pi, got {theta1}")


def condensed_contains(
    q: complex,
    theta1: float,
    variant: str = "open",
    *,
    kappa0: float = 1.0,
    tol: float = BOUNDARY_TOL,
) -> RegionVerdict:
    """Tri-state membership of q in the region reachable by condensed curves.

    ``variant`` is accepted for symmetry with the boolean helpers; the verdict
    itself is the same for both and is resolved by ``RegionVerdict.as_bool``.
    """
    _check_variant(variant)
    return condensed_region(theta1).verdict(kappa0 * q, tol)


def critical_contains(
    q: complex,
    theta1: float,
    sigma: SignString,
    variant: str = "open",
    *,
    kappa0: float = 1.0,
    tol: float = BOUNDARY_TOL,
) -> RegionVerdict:
    _check_variant(variant)
    return critical_region(theta1, sigma).verdict(kappa0 * q, tol)


_MINUS_PLUS = SignString((-1, 1))


def any_critical_contains(
    q: complex,
    theta1: float,
    variant: str = "open",
    *,
    kappa0: float = 1.0,
    tol: float = BOUNDARY_TOL,
) -> RegionVerdict:
    _check_critical_theta(theta1)
    sigma = _MINUS_PLUS if theta1 >= 0 else -_MINUS_PLUS
    return critical_contains(q, theta1, sigma, variant, kappa0=kappa0, tol=tol)


def disconnection_test(
    q: complex,
    theta1: float,
    variant: str = "open",
    *,
    kappa0: float = 1.0,
    tol: float = BOUNDARY_TOL,
) -> bool:
    """True when condensed curves reach q but critical curves do not.

    The open variant keeps the radius-4 arc and drops the radius-2 arcs; the
    closed variant does the opposite.
    """
    _check_variant(variant)
    if abs(theta1) >= math.pi:
        return False
    condensed = condensed_contains(q, theta1, variant, kappa0=kappa0, tol=tol).status
    critical = any_critical_contains(q, theta1, variant, kappa0=kappa0, tol=tol).status
    if variant == "open":
        return condensed is RegionStatus.INSIDE and critical is not RegionStatus.INSIDE
    return condensed is not RegionStatus.OUTSIDE and critical is RegionStatus.OUTSIDE


def _check_variant(variant: str) -> None:
    if variant not in ("open", "closed"):
        raise ValueError(f"unknown variant: {variant}")


def amplitude_circle_test(q: complex, theta1: float, omega: float) -> bool:
    """True when q lies strictly inside the circle that excludes amplitude omega."""
    _check_amplitude(theta1, omega)
    z = cmath.exp(1j * theta1)
    center = sign(theta1) * 1j * (z - 1)
    return abs(q - center) < 4.0 * math.sin(0.5 * omega)


def _check_amplitude(theta1: float, omega: float) -> None:
    if abs(theta1) > math.pi + _RANGE_TOL:
        raise DomainError(f"|theta1| must be at most pi, got {theta1}")
    if not abs(theta1) - _RANGE_TOL <= omega <= math.pi + _RANGE_TOL:
        raise DomainError(f"amplitude {omega} outside [|theta1|, pi] for theta1={theta1}")


@dataclass(frozen=True)
class CondensedPlus:
    phi: float


@dataclass(frozen=True)
class CondensedMinus:
    psi: float


@dataclass(frozen=True)
class Critical:
    sigma: SignString
    mu: float


@dataclass(frozen=True)
class Amplitude:
    omega: float
    mu: float


Family = Union[CondensedPlus, CondensedMinus, Critical, Amplitude]


def _mirror_family(family: Family) -> Family:
    if isinstance(family, Critical):
        return Critical(-family.sigma, family.mu)
    return family


def _require(value: float, lo: float, hi: float, name: str) -> None:
    if not lo - _RANGE_TOL <= value <= hi + _RANGE_TOL:
        raise ParameterOutOfRange(f"{name}={value} outside [{lo}, {hi}]")


def _check_family(theta1: float, family: Family) -> None:
    if isinstance(family, CondensedPlus):
        _require(family.phi, theta1, math.pi, "phi")
    elif isinstance(family, CondensedMinus):
        _require(family.psi, theta1 - math.pi, 0.0, "psi")
    elif isinstance(family, Critical):
        _require(family.mu, theta1 - math.pi, 0.0, "mu")
    elif isinstance(family, Amplitude):
        _require(family.omega, theta1, math.pi, "omega")
        _require(family.mu, theta1 - family.omega, 0.0, "mu")
    else:
        raise TypeError(f"unknown extremal family: {family!r}")


def extremal_boundary_point(theta1: float, family: Family) -> Frame:
    """End frame of the extremal curve of the family, in closed form."""
    if abs(theta1) > math.pi + _RANGE_TOL:
        raise ParameterOutOfRange(f"|theta1| must be at most pi, got {theta1}")
    if theta1 < 0:
        return extremal_boundary_point(-theta1, _mirror_family(family)).conjugate()
    _check_family(theta1, family)
    z = cmath.exp(1j * theta1)
    if isinstance(family, CondensedPlus):
        pos = (1j + 1j * z) - 2j * cmath.exp(1j * family.phi)
    elif isinstance(family, CondensedMinus):
        pos = (-1j - 1j * z) + 2j * cmath.exp(1j * family.psi)
    elif isinstance(family, Critical):
        radius = 2.0 * len(family.sigma)
        pos = critical_center(theta1, family.sigma) + radius * 1j * cmath.exp(1j * family.mu)
    else:
        half = 0.5 * family.omega
        pos = (-1j + 1j * z) + 4.0 * math.sin(half) * cmath.exp(1j * (family.mu + half))
    return Frame(pos, z)


def _unit_arcs(headings: Sequence[float]) -> List[ArcSegment]:
    segs: List[ArcSegment] = []
    for a, b in zip(headings, headings[1:]):
        if b != a:
            segs.append(ArcSegment(1.0 if b > a else -1.0, abs(b - a)))
    return segs


def extremal_curve(theta1: float, family: Family) -> PiecewiseCurve:
    """The unit-curvature arc chain whose endpoint traces the family."""
    if abs(theta1) > math.pi + _RANGE_TOL:
        raise ParameterOutOfRange(f"|theta1| must be at most pi, got {theta1}")
    if theta1 < 0:
        return reflect(extremal_curve(-theta1, _mirror_family(family)))
    _check_family(theta1, family)
    if isinstance(family, CondensedPlus):
        headings = [0.0, family.phi, theta1]
    elif isinstance(family, CondensedMinus):
        headings = [0.0, family.psi, theta1]
    elif isinstance(family, Critical):
        extremes = [family.mu + math.pi if s > 0 else family.mu for s in family.sigma.signs]
        headings = [0.0, *extremes, theta1]
    else:
        headings = [0.0, family.mu, family.mu + family.omega, theta1]
    segs = _unit_arcs(headings)
    if not segs:
        raise ParameterOutOfRange("the extremal curve degenerates to a point")
    return PiecewiseCurve(ORIGIN, tuple(segs))


def bounding_circle(theta1: float, family: Family) -> Circle:
    """Circle on which the family's endpoints lie."""
    if theta1 < 0:
        circle = bounding_circle(-theta1, _mirror_family(family))
        return Circle(circle.center.conjugate(), circle.radius)
    z = cmath.exp(1j * theta1)
    if isinstance(family, CondensedPlus):
        return Circle(1j + 1j * z, 2.0)
    if isinstance(family, CondensedMinus):
        return Circle(-1j - 1j * z, 2.0)
    if isinstance(family, Critical):
        return Circle(critical_center(theta1, family.sigma), 2.0 * len(family.sigma))
    return Circle(-1j + 1j * z, 4.0 * math.sin(0.5 * family.omega))


def emit_region_boundary(
    region: RegionSpec, ds: float, ray_length: float = 8.0
) -> List[np.ndarray]:
    if not ds > 0:
        raise ValueError("ds must be positive")
    polylines: List[np.ndarray] = []
    for circle, (lo, hi) in region.arcs:
        steps = max(1, math.ceil(circle.radius * (hi - lo) / ds))
        ts = np.linspace(lo, hi, steps + 1)
        polylines.append(circle.center + circle.radius * np.exp(1j * ts))
    for ray in region.half_planes:
        steps = max(1, math.ceil(ray_length / ds))
        polylines.append(ray.anchor + ray.direction * np.linspace(0.0, ray_length, steps + 1))
    return polylines


def grid_statuses(
    points: Iterable[complex], theta1: float, which: str = "condensed", **kwargs
) -> List[RegionStatus]:
    if which == "condensed":
        region = condensed_region(theta1)
    elif which == "critical":
        sigma = kwargs.pop("sigma", None)
        if sigma is None:
            sigma = _MINUS_PLUS if theta1 >= 0 else -_MINUS_PLUS
        region = critical_region(theta1, sigma)
    else:
        raise ValueError(f"unknown region: {which}")
    tol = kwargs.pop("tol", BOUNDARY_TOL)
    return [region.verdict(q, tol).status for q in points]
