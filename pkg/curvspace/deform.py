from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .curve import (
    ArcSegment,
    CurveClass,
    FrameMismatch,
    HomotopyTrace,
    OutOfBounds,
    PiecewiseCurve,
    SampledCurve,
    concat,
    diagnostics_of,
    end_frame,
    evaluate,
    heading_at,
    in_bounds,
    split_at,
    turning_breakpoints,
    turning_profile,
)
from .normalize import Bounds, canonicalize
from .regions import disconnection_test

logger = logging.getLogger(__name__)

LOOP_RADIUS = 2.0
LOOP_CURVATURE = 1.0 / LOOP_RADIUS
LOOP_LENGTH = 2.0 * math.pi * LOOP_RADIUS
HEADING_TOL = 1e-9
FRAME_TOL = 1e-9
DEFAULT_T0 = 0.5
DEFAULT_EPS = 0.125
DEFAULT_DS = 0.05

# values, first and second derivatives of a closed pattern on [0, 1]
Pattern = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]]


class BadWindow(ValueError):
    pass


class PairingViolation(ValueError):
    pass


class NotDiffuse(ValueError):
    pass


class NotLocallyConvex(ValueError):
    pass


class TurningMismatch(ValueError):
    pass


class NotApplicable(ValueError):
    pass


@dataclass(frozen=True)
class LoopEight:
    """n loops (turning n) or n figure eights (turning 0) of radius 2 from the origin."""

    kind: str
    n: int

    def __post_init__(self) -> None:
        if self.kind not in ("loop", "eight"):
            raise ValueError(f"kind must be 'loop' or 'eight', got {self.kind!r}")
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")

    @property
    def curve(self) -> PiecewiseCurve:
        if self.kind == "loop":
            unit = [ArcSegment(LOOP_CURVATURE, LOOP_LENGTH)]
        else:
            unit = [ArcSegment(LOOP_CURVATURE, LOOP_LENGTH), ArcSegment(-LOOP_CURVATURE, LOOP_LENGTH)]
        return PiecewiseCurve.from_pairs(
            [(seg.kappa, seg.length) for _ in range(self.n) for seg in unit]
        )

    @property
    def turning(self) -> float:
        return 2.0 * math.pi * self.n if self.kind == "loop" else 0.0


def loop(n: int) -> PiecewiseCurve:
    return LoopEight("loop", n).curve


def eight(n: int) -> PiecewiseCurve:
    return LoopEight("eight", n).curve


def attach_eight(
    c: PiecewiseCurve,
    n: int = 1,
    t0: float = DEFAULT_T0,
    eps: float = DEFAULT_EPS,
    kind: str = "eight",
) -> PiecewiseCurve:
    """Insert n loops or eights at the frame reached at fraction t0 of c.

    ``eps`` is the half-width of the parameter window the insertion occupies;
    it only affects the parametrization, the traced curve is the same.
    """
    if not 0.0 < 2.0 * eps < min(t0, 1.0 - t0):
        raise BadWindow(f"window eps={eps} does not fit around t0={t0}")
    inserted = LoopEight(kind, n).curve
    s = t0 * c.length
    head, tail = split_at(c, s)
    anchor = end_frame(head)
    return concat(concat(head, inserted.with_start(anchor)), tail)


def _eight_pattern(u: np.ndarray):
    # left loop on [0, 1/2], right loop on [1/2, 1]; unit-speed arcs of radius 2 scaled to [0, 1]
    u = np.asarray(u, dtype=float)
    left = np.mod(u, 1.0) < 0.5
    spin = np.where(left, 1.0, -1.0)
    turn = np.exp(spin * 4j * math.pi * u)
    value = spin * 2j * (1.0 - turn)
    first = 8.0 * math.pi * turn
    second = spin * 32j * math.pi**2 * turn
    return value, first, second


def _quarter_loop_pattern(u: np.ndarray):
    u = np.asarray(u, dtype=float)
    turn = np.exp(2j * math.pi * u)
    return 0.5j * (1.0 - turn), math.pi * turn, 2j * math.pi**2 * turn


def _spread(c: PiecewiseCurve, n: int, pattern: Pattern, pattern_speed: float, ds: float) -> SampledCurve:
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if not ds > 0:
        raise ValueError("ds must be positive")
    total = c.length
    count = max(64 * n, math.ceil((total + pattern_speed * n) / ds)) + 1
    t = np.linspace(0.0, 1.0, count)
    base, tangent, kappa = evaluate(c, total * t)
    value, first, second = pattern(n * t)
    speed = total + 1j * total * kappa * value + n * first
    accel = 1j * total * kappa * speed + 1j * total * kappa * n * first + n * n * second
    points = base + tangent * value
    velocity = tangent * speed
    curvature = (np.conj(speed) * accel).imag / np.abs(speed) ** 3
    headings = np.unwrap(np.angle(velocity))
    headings += c.start.theta - headings[0]
    arclength = cumulative_trapezoid(np.abs(speed), t, initial=0.0)
    return SampledCurve(points=points, headings=headings, arclength=arclength, curvature=curvature)


def spread_eights(c: PiecewiseCurve, n: int, ds: float = DEFAULT_DS) -> SampledCurve:
    """c with n eights spread uniformly along it; curvature tends to +-1/2."""
    return _spread(c, n, _eight_pattern, 2.0 * LOOP_LENGTH, ds)


def spread_loops(c: PiecewiseCurve, n: int, ds: float = DEFAULT_DS) -> SampledCurve:
    """c with n loops of radius 1/2 spread along it; curvature tends to 2."""
    return _spread(c, n, _quarter_loop_pattern, math.pi, ds)


def bridge_endpoints(
    c: PiecewiseCurve,
    n: int,
    t0: float = DEFAULT_T0,
    eps: float = DEFAULT_EPS,
    ds: float = DEFAULT_DS,
) -> Tuple[PiecewiseCurve, SampledCurve]:
    return attach_eight(c, n, t0, eps, "eight"), spread_eights(c, n, ds)


def _check_pairing(c: PiecewiseCurve, insertions, pairing: Sequence[int]) -> None:
    k = len(insertions)
    if sorted(pairing) != list(range(k)):
        raise PairingViolation(f"pairing {list(pairing)} is not a permutation of {k} insertions")
    total = c.length
    for s, sigma in insertions:
        if not 0.0 <= s <= total:
            raise PairingViolation(f"insertion point {s} outside [0, {total}]")
        if sigma < 0.0:
            raise PairingViolation(f"insertion length {sigma} is negative")
    headings = [heading_at(c, s) for s, _ in insertions]
    for i, j in enumerate(pairing):
        if abs(insertions[j][1] - insertions[i][1]) > HEADING_TOL:
            raise PairingViolation(f"insertions {i} and {j} have different lengths")
        if abs(np.exp(1j * headings[j]) + np.exp(1j * headings[i])) > HEADING_TOL:
            raise PairingViolation(f"headings at insertions {i} and {j} are not opposite")


def graft(
    c: PiecewiseCurve,
    insertions: Sequence[Tuple[float, float]],
    pairing: Sequence[int],
) -> PiecewiseCurve:
    """Insert straight pieces of length sigma_i at arc lengths s_i.

    Paired insertions have equal lengths and opposite headings, so the
    translations cancel and the end frame is unchanged.
    """
    insertions = [(float(s), float(sigma)) for s, sigma in insertions]
    _check_pairing(c, insertions, pairing)
    cuts = sorted((s, sigma) for s, sigma in insertions if sigma > 0.0)
    segs: List[ArcSegment] = []
    travelled = 0.0
    pending = list(cuts)
    for seg in c.segs:
        done = 0.0
        while pending and pending[0][0] <= travelled + seg.length:
            s, sigma = pending.pop(0)
            offset = min(max(s - travelled, done), seg.length)
            if offset > done:
                segs.append(ArcSegment(seg.kappa, offset - done))
                done = offset
            segs.append(ArcSegment(0.0, sigma))
        if seg.length > done:
            segs.append(ArcSegment(seg.kappa, seg.length - done))
        travelled += seg.length
    for _, sigma in pending:
        segs.append(ArcSegment(0.0, sigma))
    return PiecewiseCurve(c.start, tuple(segs))


def _crossings(c: PiecewiseCurve, level: float) -> List[float]:
    thetas = turning_breakpoints(c)
    found: List[float] = []
    travelled = 0.0
    for k, seg in enumerate(c.segs):
        lo, hi = sorted((thetas[k], thetas[k + 1]))
        if seg.kappa != 0.0 and lo <= level <= hi:
            found.append(travelled + (level - thetas[k]) / seg.kappa)
        travelled += seg.length
    return found


def find_antipodal_pairs(c: PiecewiseCurve) -> List[Tuple[float, float]]:
    """Arc lengths (s, s') with opposite unit tangents, starting from the extremes of theta."""
    profile = turning_profile(c)
    if profile.curve_class != CurveClass.DIFFUSE:
        raise NotDiffuse(f"antipodal pairs need a diffuse curve, amplitude is {profile.omega}")
    thetas = turning_breakpoints(c)
    breaks = np.concatenate(([0.0], np.cumsum([seg.length for seg in c.segs])))
    pairs: List[Tuple[float, float]] = []
    for index, shift in ((int(np.argmin(thetas)), math.pi), (int(np.argmax(thetas)), -math.pi)):
        s = float(breaks[index])
        hits = _crossings(c, float(thetas[index]) + shift)
        if not hits:
            continue
        other = min(hits, key=lambda x: abs(x - s))
        pair = (min(s, other), max(s, other))
        if pair not in pairs:
            pairs.append(pair)
    logger.debug("found %d antipodal pairs", len(pairs))
    return pairs


def _theta_grid(c0: PiecewiseCurve, c1: PiecewiseCurve) -> np.ndarray:
    merged = np.unique(np.concatenate((turning_breakpoints(c0), turning_breakpoints(c1))))
    keep = np.concatenate(([True], np.diff(merged) > 1e-12))
    grid = merged[keep]
    grid[-1] = max(merged[-1], grid[-1])
    return grid


def radius_profile(c: PiecewiseCurve, grid: np.ndarray) -> np.ndarray:
    """Radius of curvature on each bin of an increasing theta grid."""
    thetas = turning_breakpoints(c)
    mids = 0.5 * (grid[:-1] + grid[1:])
    index = np.clip(np.searchsorted(thetas, mids, side="right") - 1, 0, len(c.segs) - 1)
    return 1.0 / np.array(c.curvatures)[index]


def _check_convex_pair(c0: PiecewiseCurve, c1: PiecewiseCurve) -> None:
    for name, c in (("first", c0), ("second", c1)):
        if any(seg.kappa <= 0.0 for seg in c.segs):
            raise NotLocallyConvex(f"{name} curve has a non-positive curvature")
    if not c0.start.close_to(c1.start, FRAME_TOL):
        raise FrameMismatch("curves start at different frames")
    if not end_frame(c0).close_to(end_frame(c1), FRAME_TOL):
        raise FrameMismatch("curves end at different frames")
    t0, t1 = turning_profile(c0).theta1, turning_profile(c1).theta1
    if abs(t0 - t1) > HEADING_TOL:
        raise TurningMismatch(f"total turnings differ: {t0} vs {t1}")


def locally_convex_homotopy(
    c0: PiecewiseCurve, c1: PiecewiseCurve, n_steps: int = 16
) -> HomotopyTrace:
    """Interpolate the radius of curvature as a function of the tangent angle."""
    _check_convex_pair(c0, c1)
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    grid = _theta_grid(c0, c1)
    widths = np.diff(grid)
    rho0, rho1 = radius_profile(c0, grid), radius_profile(c1, grid)
    s_grid = tuple(k / n_steps for k in range(n_steps + 1))
    curves = []
    for s in s_grid:
        rho = (1.0 - s) * rho0 + s * rho1
        pairs = [(1.0 / r, r * w) for r, w in zip(rho, widths) if w > 0.0]
        curves.append(PiecewiseCurve.from_pairs(pairs, start=c0.start))
    return HomotopyTrace(
        s=s_grid,
        curves=tuple(curves),
        diagnostics=tuple(diagnostics_of(s, c) for s, c in zip(s_grid, curves)),
    )


def eight_same_component(c: PiecewiseCurve, bounds: Bounds, variant: str = "open") -> bool:
    """Whether c can be deformed into c with an eight attached."""
    if bounds.kappa1 * bounds.kappa2 >= 0.0 or bounds.sign_class == "zero":
        raise NotApplicable("an eight needs curvatures of both signs")
    closed = variant == "closed" and math.isfinite(bounds.kappa1) and math.isfinite(bounds.kappa2)
    if not in_bounds(c, bounds.kappa1, bounds.kappa2, "closed" if closed else "open"):
        raise OutOfBounds(f"curve leaves the bounds ({bounds.kappa1}, {bounds.kappa2})")
    profile = turning_profile(c)
    if profile.curve_class == CurveClass.DIFFUSE:
        return True
    if bounds.unconstrained:
        return True
    rec = canonicalize(c.start, end_frame(c), bounds)
    return not disconnection_test(rec.q0.p, rec.turning_sign * profile.theta1, variant)

