from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from .geom import ORIGIN, Frame, frame_mul

SeedLike = Union[int, np.random.Generator, None]

CLASSIFICATION_TOL = 1e-9
FRAME_TOL = 1e-9


class FrameMismatch(ValueError):
    pass


class InvalidBounds(ValueError):
    pass


class OutOfBounds(ValueError):
    pass


class CurveClass(str, Enum):
    CONDENSED = "condensed"
    CRITICAL = "critical"
    DIFFUSE = "diffuse"


@dataclass(frozen=True)
class ArcSegment:
    kappa: float
    length: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.kappa):
            raise ValueError(f"segment curvature must be finite, got {self.kappa}")
        if not (self.length > 0 and math.isfinite(self.length)):
            raise ValueError(f"segment length must be positive, got {self.length}")

    @property
    def turning(self) -> float:
        return self.kappa * self.length


@dataclass(frozen=True)
class PiecewiseCurve:
    """Arc-length parametrized curve of piecewise constant curvature."""

    start: Frame
    segs: Tuple[ArcSegment, ...]

    def __post_init__(self) -> None:
        segs = tuple(self.segs)
        if not segs:
            raise ValueError("a curve needs at least one segment")
        object.__setattr__(self, "segs", segs)

    @classmethod
    def from_pairs(
        cls, pairs: Iterable[Tuple[float, float]], start: Frame = ORIGIN
    ) -> "PiecewiseCurve":
        return cls(start, tuple(ArcSegment(float(k), float(l)) for k, l in pairs))

    @property
    def length(self) -> float:
        return math.fsum(seg.length for seg in self.segs)

    @property
    def curvatures(self) -> List[float]:
        return [seg.kappa for seg in self.segs]

    def with_start(self, start: Frame) -> "PiecewiseCurve":
        return PiecewiseCurve(start, self.segs)


@dataclass(frozen=True)
class TurningProfile:
    theta_plus: float
    theta_minus: float
    theta1: float
    omega: float
    curve_class: CurveClass


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Dense polyline with headings, used where curves are not piecewise circular."""

    points: np.ndarray
    headings: np.ndarray
    arclength: np.ndarray
    curvature: np.ndarray | None = field(default=None)

    @property
    def start(self) -> Frame:
        return Frame.from_angle(complex(self.points[0]), float(self.headings[0]))

    @property
    def end(self) -> Frame:
        return Frame.from_angle(complex(self.points[-1]), float(self.headings[-1]))

    @property
    def length(self) -> float:
        return float(self.arclength[-1])


@dataclass(frozen=True)
class StepDiagnostics:
    s: float
    theta1: float
    omega: float
    length: float
    max_kappa: float
    end: Frame


@dataclass(frozen=True, eq=False)
class HomotopyTrace:
    """Curves of a homotopy sampled on an increasing parameter grid."""

    s: Tuple[float, ...]
    curves: Tuple[Union[PiecewiseCurve, SampledCurve], ...]
    diagnostics: Tuple[StepDiagnostics, ...]

    def end_drift(self) -> float:
        first = self.diagnostics[0].end
        return max(
            max(abs(d.end.p - first.p), abs(d.end.w - first.w)) for d in self.diagnostics
        )

    def theta1_drift(self) -> float:
        first = self.diagnostics[0].theta1
        return max(abs(d.theta1 - first) for d in self.diagnostics)


def diagnostics_of(s: float, c: PiecewiseCurve) -> StepDiagnostics:
    profile = turning_profile(c)
    return StepDiagnostics(
        s=s,
        theta1=profile.theta1,
        omega=profile.omega,
        length=c.length,
        max_kappa=max(abs(seg.kappa) for seg in c.segs),
        end=end_frame(c),
    )


def segment_motion(seg: ArcSegment) -> Frame:
    """End frame of a single segment started at the origin frame."""
    if seg.kappa == 0.0:
        return Frame(complex(seg.length, 0.0), 1 + 0j)
    turn = cmath.exp(1j * seg.turning)
    return Frame((1j / seg.kappa) * (1 - turn), turn)


def _partial_motion(kappa: float, s: float) -> Frame:
    if kappa == 0.0:
        return Frame(complex(s, 0.0), 1 + 0j)
    turn = cmath.exp(1j * kappa * s)
    return Frame((1j / kappa) * (1 - turn), turn)


def motion(segs: Sequence[ArcSegment]) -> Frame:
    result = ORIGIN
    for seg in segs:
        result = frame_mul(result, segment_motion(seg))
    return result


def end_frame(c: PiecewiseCurve) -> Frame:
    return frame_mul(c.start, motion(c.segs))


def breakpoint_frames(c: PiecewiseCurve) -> List[Frame]:
    frames = [c.start]
    for seg in c.segs:
        frames.append(frame_mul(frames[-1], segment_motion(seg)))
    return frames


def turning_breakpoints(c: PiecewiseCurve) -> np.ndarray:
    """theta at every breakpoint, with theta(0) = 0."""
    return np.concatenate(([0.0], np.cumsum([seg.turning for seg in c.segs])))


def arclength_breakpoints(c: PiecewiseCurve) -> np.ndarray:
    return np.concatenate(([0.0], np.cumsum([seg.length for seg in c.segs])))


def classify_amplitude(omega: float, tol: float = CLASSIFICATION_TOL) -> CurveClass:
    if omega < math.pi - tol:
        return CurveClass.CONDENSED
    if omega > math.pi + tol:
        return CurveClass.DIFFUSE
    return CurveClass.CRITICAL


def turning_profile(c: PiecewiseCurve, tol: float = CLASSIFICATION_TOL) -> TurningProfile:
    thetas = turning_breakpoints(c)
    theta_plus = float(thetas.max())
    theta_minus = float(thetas.min())
    omega = theta_plus - theta_minus
    return TurningProfile(
        theta_plus=theta_plus,
        theta_minus=theta_minus,
        theta1=math.fsum(seg.turning for seg in c.segs),
        omega=omega,
        curve_class=classify_amplitude(omega, tol),
    )


def concat(c1: PiecewiseCurve, c2: PiecewiseCurve, tol: float = FRAME_TOL) -> PiecewiseCurve:
    joint = end_frame(c1)
    if not joint.close_to(c2.start, tol):
        raise FrameMismatch(
            f"end frame {joint} of the first curve does not match start {c2.start}"
        )
    return PiecewiseCurve(c1.start, c1.segs + c2.segs)


def reverse(c: PiecewiseCurve) -> PiecewiseCurve:
    final = end_frame(c)
    segs = tuple(ArcSegment(-seg.kappa, seg.length) for seg in reversed(c.segs))
    return PiecewiseCurve(Frame(final.p, -final.w), segs)


def reflect(c: PiecewiseCurve) -> PiecewiseCurve:
    """Mirror image of c across the real axis."""
    segs = tuple(ArcSegment(-seg.kappa, seg.length) for seg in c.segs)
    return PiecewiseCurve(c.start.conjugate(), segs)


def check_bounds(kappa1: float, kappa2: float) -> None:
    if math.isnan(kappa1) or math.isnan(kappa2) or not kappa1 < kappa2:
        raise InvalidBounds(f"curvature bounds must satisfy k1 < k2, got ({kappa1}, {kappa2})")


def in_bounds(c: PiecewiseCurve, kappa1: float, kappa2: float, variant: str = "open") -> bool:
    check_bounds(kappa1, kappa2)
    if variant == "open":
        return all(kappa1 < seg.kappa < kappa2 for seg in c.segs)
    if variant == "closed":
        if not (math.isfinite(kappa1) and math.isfinite(kappa2)):
            raise InvalidBounds("closed bounds must be finite")
        return all(kappa1 <= seg.kappa <= kappa2 for seg in c.segs)
    raise ValueError(f"unknown variant: {variant}")


def _locate(c: PiecewiseCurve, s: float) -> Tuple[int, float]:
    """Index of the segment containing arc length s and the offset into it."""
    remaining = s
    for index, seg in enumerate(c.segs):
        if remaining <= seg.length:
            return index, remaining
        remaining -= seg.length
    last = len(c.segs) - 1
    return last, c.segs[last].length


def frame_at(c: PiecewiseCurve, s: float) -> Frame:
    if s < 0 or s > c.length * (1 + 1e-12):
        raise ValueError(f"arc length {s} outside [0, {c.length}]")
    index, offset = _locate(c, s)
    frame = frame_mul(c.start, motion(c.segs[:index]))
    return frame_mul(frame, _partial_motion(c.segs[index].kappa, offset))


def heading_at(c: PiecewiseCurve, s: float) -> float:
    """Continuous turning function theta(s) with theta(0) = 0."""
    index, offset = _locate(c, s)
    return math.fsum([seg.turning for seg in c.segs[:index]] + [c.segs[index].kappa * offset])


def split_at(c: PiecewiseCurve, s: float) -> Tuple[PiecewiseCurve, PiecewiseCurve]:
    total = c.length
    if not 0 < s < total:
        raise ValueError(f"split point {s} must lie strictly inside (0, {total})")
    index, offset = _locate(c, s)
    head = list(c.segs[:index])
    tail = list(c.segs[index + 1 :])
    seg = c.segs[index]
    if offset > 0:
        head.append(ArcSegment(seg.kappa, offset))
    if seg.length - offset > 0:
        tail.insert(0, ArcSegment(seg.kappa, seg.length - offset))
    first = PiecewiseCurve(c.start, tuple(head))
    second = PiecewiseCurve(end_frame(first), tuple(tail))
    return first, second


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sampling_interval(
    kappa1: float, kappa2: float, curvature_cap: float = 8.0, margin: float = 1e-6
) -> Tuple[float, float]:
    """Closed interval strictly inside (k1, k2) from which curvatures are drawn."""
    check_bounds(kappa1, kappa2)
    lo = kappa1 + margin if math.isfinite(kappa1) else -curvature_cap
    hi = kappa2 - margin if math.isfinite(kappa2) else curvature_cap
    if not math.isfinite(kappa2) and hi <= lo:
        hi = lo + curvature_cap
    if not math.isfinite(kappa1) and lo >= hi:
        lo = hi - curvature_cap
    if lo > hi:
        mid = 0.5 * (kappa1 + kappa2)
        lo = hi = mid
    return lo, hi


def random_curve(
    kappa1: float,
    kappa2: float,
    n_segs: int,
    max_seg_len: float,
    seed: SeedLike = None,
    *,
    start: Frame = ORIGIN,
    curvature_cap: float = 8.0,
    margin: float = 1e-6,
) -> PiecewiseCurve:
    if n_segs < 1:
        raise ValueError("n_segs must be at least 1")
    if not max_seg_len > 0:
        raise ValueError("max_seg_len must be positive")
    rng = make_rng(seed)
    lo, hi = sampling_interval(kappa1, kappa2, curvature_cap, margin)
    kappas = rng.uniform(lo, hi, size=n_segs)
    lengths = rng.uniform(1e-3 * max_seg_len, max_seg_len, size=n_segs)
    return PiecewiseCurve(
        start, tuple(ArcSegment(float(k), float(l)) for k, l in zip(kappas, lengths))
    )


def random_critical_curve(
    seed: SeedLike = None,
    *,
    kappa_max: float = 0.999,
    max_straight: float = 1.5,
) -> PiecewiseCurve:
    """Random curve in (-1, 1) from the origin whose amplitude is exactly pi.

    The turning function climbs or descends to one extreme, crosses to the
    antipodal extreme and settles at a random total turning between them.
    """
    rng = make_rng(seed)
    mu = float(rng.uniform(-math.pi, 0.0))
    top = mu + math.pi
    targets = [top, mu] if rng.random() < 0.5 else [mu, top]
    targets.append(float(rng.uniform(mu, top)))
    segs: List[ArcSegment] = []
    current = 0.0
    for target in targets:
        delta = target - current
        if delta != 0.0:
            k = float(rng.uniform(0.2, kappa_max))
            segs.append(ArcSegment(math.copysign(k, delta), abs(delta) / k))
            current = target
        if rng.random() < 0.7:
            segs.append(ArcSegment(0.0, float(rng.uniform(1e-3, max_straight))))
    return PiecewiseCurve(ORIGIN, tuple(segs))


def sample_points(c: PiecewiseCurve, ds: float) -> SampledCurve:
    if not ds > 0:
        raise ValueError("ds must be positive")
    points: List[complex] = [c.start.p]
    headings: List[float] = [c.start.theta]
    arclength: List[float] = [0.0]
    frame = c.start
    theta = c.start.theta
    travelled = 0.0
    for seg in c.segs:
        steps = max(1, math.ceil(seg.length / ds))
        for j in range(1, steps + 1):
            offset = seg.length * j / steps
            local = frame_mul(frame, _partial_motion(seg.kappa, offset))
            points.append(local.p)
            headings.append(theta + seg.kappa * offset)
            arclength.append(travelled + offset)
        frame = frame_mul(frame, segment_motion(seg))
        theta += seg.turning
        travelled += seg.length
    return SampledCurve(
        points=np.asarray(points, dtype=complex),
        headings=np.asarray(headings, dtype=float),
        arclength=np.asarray(arclength, dtype=float),
    )


def evaluate(c: PiecewiseCurve, s: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Positions, unit tangents and curvatures at the arc lengths s."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, c.length)
    breaks = arclength_breakpoints(c)
    index = np.clip(np.searchsorted(breaks, s, side="right") - 1, 0, len(c.segs) - 1)
    frames = breakpoint_frames(c)
    base_p = np.array([f.p for f in frames[:-1]])[index]
    base_w = np.array([f.w for f in frames[:-1]])[index]
    kappa = np.array(c.curvatures)[index]
    offset = s - breaks[index]
    turn = np.exp(1j * kappa * offset)
    safe = np.where(kappa == 0.0, 1.0, kappa)
    local = np.where(kappa == 0.0, offset + 0j, (1j / safe) * (1.0 - turn))
    return base_p + base_w * local, base_w * turn, kappa


def discrete_curvature(points: np.ndarray, param: np.ndarray | None = None) -> np.ndarray:
    """Signed curvature of a polyline from central differences."""
    grid = np.arange(points.size, dtype=float) if param is None else param
    x = np.gradient(points.real, grid, edge_order=2)
    y = np.gradient(points.imag, grid, edge_order=2)
    xx = np.gradient(x, grid, edge_order=2)
    yy = np.gradient(y, grid, edge_order=2)
    return (x * yy - y * xx) / np.power(x * x + y * y, 1.5)
