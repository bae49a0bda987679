from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple, Union

from .curve import ArcSegment, PiecewiseCurve, check_bounds, reverse
from .geom import Frame, frame_inv, frame_mul

INF = math.inf


class InadmissibleU(ValueError):
    pass


class CanonicalType(str, Enum):
    SYMMETRIC = "(-1,1)"
    HALF_LINE = "(0,+inf)"
    SHIFTED = "(1,+inf)"
    UNCONSTRAINED = "unconstrained"

    @property
    def bounds(self) -> "Bounds":
        return _CANONICAL_BOUNDS[self]


def radius_of(kappa: float) -> float:
    """Signed radius of curvature, 0 for infinite curvature and inf for zero."""
    if math.isinf(kappa):
        return 0.0
    if kappa == 0.0:
        return INF
    return 1.0 / kappa


@dataclass(frozen=True)
class Bounds:
    kappa1: float
    kappa2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "kappa1", float(self.kappa1))
        object.__setattr__(self, "kappa2", float(self.kappa2))
        check_bounds(self.kappa1, self.kappa2)

    @property
    def rho1(self) -> float:
        return radius_of(self.kappa1)

    @property
    def rho2(self) -> float:
        return radius_of(self.kappa2)

    @property
    def sign_class(self) -> str:
        # 0 * (+-inf) counts as 0
        if self.kappa1 == 0.0 or self.kappa2 == 0.0:
            return "zero"
        if self.kappa1 < 0.0 < self.kappa2:
            return "neg"
        return "pos"

    @property
    def unconstrained(self) -> bool:
        return self.kappa1 == -INF and self.kappa2 == INF

    @property
    def symmetric(self) -> bool:
        return self.kappa1 == -self.kappa2

    def contains(self, kappa: float) -> bool:
        return self.kappa1 < kappa < self.kappa2


_CANONICAL_BOUNDS = {
    CanonicalType.SYMMETRIC: Bounds(-1.0, 1.0),
    CanonicalType.HALF_LINE: Bounds(0.0, INF),
    CanonicalType.SHIFTED: Bounds(1.0, INF),
    CanonicalType.UNCONSTRAINED: Bounds(-INF, INF),
}


def admissible_u_interval(b: Bounds) -> Tuple[float, float]:
    if b.kappa1 >= 0.0:
        return -INF, b.rho2
    if b.kappa2 <= 0.0:
        return b.rho1, INF
    return b.rho1, b.rho2


def normal_translate(c: PiecewiseCurve, u: float) -> PiecewiseCurve:
    segs: List[ArcSegment] = []
    for index, seg in enumerate(c.segs):
        factor = 1.0 - u * seg.kappa
        if not factor > 0.0:
            raise InadmissibleU(
                f"u={u} is not admissible for segment {index} with curvature {seg.kappa}"
            )
        segs.append(ArcSegment(seg.kappa / factor, seg.length * factor))
    start = Frame(c.start.p + 1j * u * c.start.w, c.start.w)
    return PiecewiseCurve(start, tuple(segs))


def dilate(c: PiecewiseCurve, scale: float) -> PiecewiseCurve:
    if not scale > 0.0:
        raise ValueError(f"scale must be positive, got {scale}")
    segs = tuple(ArcSegment(seg.kappa / scale, seg.length * scale) for seg in c.segs)
    return PiecewiseCurve(Frame(scale * c.start.p, c.start.w), segs)


def translate_kappa(kappa: float, u: float) -> float:
    if math.isinf(kappa):
        return -1.0 / u if u != 0.0 else kappa
    factor = 1.0 - u * kappa
    if factor == 0.0:
        return INF
    return kappa / factor


@dataclass(frozen=True)
class Reverse:
    def apply_curve(self, c: PiecewiseCurve) -> PiecewiseCurve:
        return reverse(c)

    def apply_frames(self, P: Frame, Q: Frame) -> Tuple[Frame, Frame]:
        return Frame(Q.p, -Q.w), Frame(P.p, -P.w)

    def apply_bounds(self, b: Bounds) -> Bounds:
        return Bounds(-b.kappa2, -b.kappa1)

    def inverse(self) -> "Reverse":
        return self


@dataclass(frozen=True)
class NormalTranslate:
    u: float

    def apply_curve(self, c: PiecewiseCurve) -> PiecewiseCurve:
        return normal_translate(c, self.u)

    def apply_frames(self, P: Frame, Q: Frame) -> Tuple[Frame, Frame]:
        return Frame(P.p + 1j * self.u * P.w, P.w), Frame(Q.p + 1j * self.u * Q.w, Q.w)

    def apply_bounds(self, b: Bounds) -> Bounds:
        return Bounds(translate_kappa(b.kappa1, self.u), translate_kappa(b.kappa2, self.u))

    def inverse(self) -> "NormalTranslate":
        return NormalTranslate(-self.u)


@dataclass(frozen=True)
class Dilate:
    scale: float

    def apply_curve(self, c: PiecewiseCurve) -> PiecewiseCurve:
        return dilate(c, self.scale)

    def apply_frames(self, P: Frame, Q: Frame) -> Tuple[Frame, Frame]:
        return Frame(self.scale * P.p, P.w), Frame(self.scale * Q.p, Q.w)

    def apply_bounds(self, b: Bounds) -> Bounds:
        return Bounds(b.kappa1 / self.scale, b.kappa2 / self.scale)

    def inverse(self) -> "Dilate":
        return Dilate(1.0 / self.scale)


@dataclass(frozen=True)
class LeftMultiply:
    frame: Frame

    def apply_curve(self, c: PiecewiseCurve) -> PiecewiseCurve:
        return PiecewiseCurve(frame_mul(self.frame, c.start), c.segs)

    def apply_frames(self, P: Frame, Q: Frame) -> Tuple[Frame, Frame]:
        return frame_mul(self.frame, P), frame_mul(self.frame, Q)

    def apply_bounds(self, b: Bounds) -> Bounds:
        return b

    def inverse(self) -> "LeftMultiply":
        return LeftMultiply(frame_inv(self.frame))


Step = Union[Reverse, NormalTranslate, Dilate, LeftMultiply]


@dataclass(frozen=True)
class NormalizationRecord:
    canonical_type: CanonicalType
    q0: Frame
    turning_sign: int
    pipeline: Tuple[Step, ...]
    bounds: Bounds
    case: str

    @property
    def canonical_bounds(self) -> Bounds:
        return self.canonical_type.bounds


def _case_of(b: Bounds) -> str:
    if b.unconstrained:
        return "unconstrained"
    k1, k2 = b.kappa1, b.kappa2
    if k1 < 0.0 < k2:
        return "a"
    if k1 > 0.0:
        return "b"
    if k1 == 0.0:
        return "c"
    if k2 < 0.0:
        return "d"
    return "e"


def canonical_frame(P: Frame, Q: Frame, b: Bounds) -> Tuple[str, Frame]:
    """Closed-form image of Q under the normalizing homeomorphism."""
    case = _case_of(b)
    r1, r2 = b.rho1, b.rho2
    p, w, q, z = P.p, P.w, Q.p, Q.w
    wbar, zbar = w.conjugate(), z.conjugate()
    if case == "a":
        pos = (2.0 / (r2 - r1)) * wbar * ((q - p) + 0.5j * (r1 + r2) * (z - w))
        return case, Frame(pos, z * wbar)
    if case == "b":
        return case, Frame(wbar / (r1 - r2) * ((q - p) + 1j * r2 * (z - w)), z * wbar)
    if case == "c":
        return case, Frame(wbar * ((q - p) + 1j * r2 * (z - w)), z * wbar)
    if case == "d":
        return case, Frame(zbar / (r1 - r2) * ((q - p) + 1j * r1 * (z - w)), w * zbar)
    if case == "e":
        return case, Frame(zbar * ((q - p) + 1j * r1 * (z - w)), w * zbar)
    return case, frame_mul(frame_inv(P), Q)


def _positive_steps(b: Bounds) -> List[Step]:
    """Steps taking bounds with k1 >= 0 onto (0, inf) or (1, inf)."""
    r1, r2 = b.rho1, b.rho2
    steps: List[Step] = [NormalTranslate(r2)]
    if b.kappa1 > 0.0:
        steps.append(Dilate(1.0 / (r1 - r2)))
    return steps


def canonicalize(P: Frame, Q: Frame, b: Bounds) -> NormalizationRecord:
    case, q0 = canonical_frame(P, Q, b)
    steps: List[Step] = []
    turning_sign = 1
    if case == "unconstrained":
        canonical = CanonicalType.UNCONSTRAINED
    elif case == "a":
        r1, r2 = b.rho1, b.rho2
        steps = [NormalTranslate(0.5 * (r1 + r2)), Dilate(2.0 / (r2 - r1))]
        canonical = CanonicalType.SYMMETRIC
    elif case in ("b", "c"):
        steps = _positive_steps(b)
        canonical = CanonicalType.SHIFTED if case == "b" else CanonicalType.HALF_LINE
    else:
        turning_sign = -1
        steps = [Reverse()]
        steps.extend(_positive_steps(Reverse().apply_bounds(b)))
        canonical = CanonicalType.SHIFTED if case == "d" else CanonicalType.HALF_LINE
    moved, _ = apply_frames(steps, P, Q)
    steps.append(LeftMultiply(frame_inv(moved)))
    return NormalizationRecord(
        canonical_type=canonical,
        q0=q0,
        turning_sign=turning_sign,
        pipeline=tuple(steps),
        bounds=b,
        case=case,
    )


def apply_frames(steps, P: Frame, Q: Frame) -> Tuple[Frame, Frame]:
    for step in steps:
        P, Q = step.apply_frames(P, Q)
    return P, Q


def map_bounds(b: Bounds, rec: NormalizationRecord) -> Bounds:
    for step in rec.pipeline:
        b = step.apply_bounds(b)
    return b


def map_kappa(kappa: float, rec: NormalizationRecord) -> float:
    """Image of a single curvature value; reversal negates it."""
    for step in rec.pipeline:
        if isinstance(step, Reverse):
            kappa = -kappa
        elif isinstance(step, NormalTranslate):
            kappa = translate_kappa(kappa, step.u)
        elif isinstance(step, Dilate):
            kappa = kappa / step.scale
    return kappa


def transform_curve(c: PiecewiseCurve, rec: NormalizationRecord) -> PiecewiseCurve:
    for step in rec.pipeline:
        c = step.apply_curve(c)
    return c


def restore_curve(c: PiecewiseCurve, rec: NormalizationRecord) -> PiecewiseCurve:
    for step in reversed(rec.pipeline):
        c = step.inverse().apply_curve(c)
    return c
