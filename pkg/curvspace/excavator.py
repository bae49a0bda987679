from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.optimize import brentq

from .curve import (
    ArcSegment,
    CurveClass,
    HomotopyTrace,
    OutOfBounds,
    PiecewiseCurve,
    SampledCurve,
    StepDiagnostics,
    breakpoint_frames,
    end_frame,
    in_bounds,
    turning_breakpoints,
    turning_profile,
)
from .dubins import Unreachable
from .geom import ORIGIN, Frame, frame_inv, frame_mul
from .regions import RegionStatus, condensed_contains

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 4096
DEFAULT_STEPS = 64
AREA_TOL_FACTOR = 1e-10
_KAPPA_SNAP = 1e-9
_AXIS_SCAN = 257
_LEVEL_EDGE = 1.0 - 1e-12


class NotCondensed(ValueError):
    pass


class NoAxis(RuntimeError):
    pass


class GridTooCoarse(RuntimeError):
    pass


def slope_of_sine(S: np.ndarray) -> np.ndarray:
    """tan(arcsin S), saturating to +-inf at |S| >= 1."""
    S = np.asarray(S, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = S / np.sqrt(1.0 - S * S)
    out = np.where(S >= 1.0, np.inf, out)
    return np.where(S <= -1.0, -np.inf, out)


def sine_of_slope(f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    finite = np.where(np.isfinite(f), f, 0.0)
    return np.where(np.isinf(f), np.sign(f), finite / np.sqrt(1.0 + finite * finite))


@dataclass(frozen=True, eq=False)
class ExcavatorState:
    """A condensed curve seen as the graph of a slope function over its axis.

    All arrays live on the uniform grid ``grid`` over [0, b]; headings are
    measured from the axis ``phi``.
    """

    start: Frame
    phi: float
    b: float
    kappa0: float
    grid: np.ndarray
    f: np.ndarray
    r0: float
    rb: float
    alpha_plus: float
    alpha_minus: float
    beta_plus: float
    beta_minus: float
    g_plus: np.ndarray
    g_minus: np.ndarray
    h_plus: np.ndarray
    h_minus: np.ndarray
    m_minus: float
    m_plus: float
    a1: float
    area_tol: float

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def upper(self) -> np.ndarray:
        return np.minimum(self.g_plus, self.h_plus)

    @property
    def lower(self) -> np.ndarray:
        return np.maximum(self.g_minus, self.h_minus)

    def clip(self, mu_minus: float, mu_plus: float) -> np.ndarray:
        f = self.f
        raised = np.minimum(mu_minus, self.upper)
        lowered = np.maximum(mu_plus, self.lower)
        return np.where(f < mu_minus, raised, np.where(f > mu_plus, lowered, f))

    def median(self, mu_minus: float, mu_plus: float) -> np.ndarray:
        """Pointwise median of the seven functions bounding the clipped slope."""
        stack = np.vstack(
            [
                self.h_minus,
                self.g_minus,
                np.full_like(self.f, mu_minus),
                self.f,
                np.full_like(self.f, mu_plus),
                self.g_plus,
                self.h_plus,
            ]
        )
        return np.sort(stack, axis=0)[3]

    def area(self, f_s: np.ndarray) -> float:
        return float(trapezoid(f_s, self.grid))


@dataclass(frozen=True, eq=False)
class ExcavatorStep:
    state: ExcavatorState
    s: float
    mu_minus: float
    mu_plus: float
    slope: np.ndarray

    @property
    def sine(self) -> np.ndarray:
        return sine_of_slope(self.slope)

    @property
    def area(self) -> float:
        return self.state.area(self.slope)

    @property
    def length(self) -> float:
        return float(trapezoid(np.sqrt(1.0 + self.slope**2), self.state.grid))

    @property
    def amplitude(self) -> float:
        return float(np.arctan(self.slope.max()) - np.arctan(self.slope.min()))

    @property
    def theta1(self) -> float:
        return float(np.arctan(self.slope[-1]) - np.arctan(self.slope[0]))

    @property
    def max_kappa(self) -> float:
        return float(np.abs(np.diff(self.sine)).max() / self.state.step)

    def _to_world(self, local: np.ndarray) -> np.ndarray:
        rotated = cmath.exp(1j * self.state.phi) * local
        return self.state.start.p + self.state.start.w * rotated

    def sampled(self) -> SampledCurve:
        st = self.state
        height = cumulative_trapezoid(self.slope, st.grid, initial=0.0)
        points = self._to_world(st.grid + 1j * height)
        headings = st.start.theta + st.phi + np.arctan(self.slope)
        arclength = cumulative_trapezoid(np.sqrt(1.0 + self.slope**2), st.grid, initial=0.0)
        curvature = np.concatenate(([0.0], np.diff(self.sine) / st.step))
        curvature[0] = curvature[1] if curvature.size > 1 else 0.0
        return SampledCurve(points=points, headings=headings, arclength=arclength, curvature=curvature)

    def end_frame(self) -> Frame:
        return self.sampled().end

    def to_piecewise(self) -> PiecewiseCurve:
        """One exact arc per grid cell, merging neighbours of equal curvature."""
        st = self.state
        S = self.sine
        h = st.step
        pairs: List[Tuple[float, float]] = []
        for a, b in zip(S[:-1], S[1:]):
            delta = float(b - a)
            if abs(delta) <= 1e-15:
                kappa, length = 0.0, h / math.sqrt(1.0 - float(a) ** 2)
            else:
                kappa = delta / h
                length = (math.asin(float(b)) - math.asin(float(a))) / kappa
            if pairs and abs(pairs[-1][0] - kappa) <= 1e-12:
                pairs[-1] = (pairs[-1][0], pairs[-1][1] + length)
            else:
                pairs.append((kappa, length))
        heading = st.start.theta + st.phi + math.asin(float(S[0]))
        start = Frame.from_angle(st.start.p, heading)
        return PiecewiseCurve.from_pairs(pairs, start=start)

    def diagnostics(self) -> StepDiagnostics:
        return StepDiagnostics(
            s=self.s,
            theta1=self.theta1,
            omega=self.amplitude,
            length=self.length,
            max_kappa=self.max_kappa,
            end=self.end_frame(),
        )


def _sine_profile(c: PiecewiseCurve, phi: float, grid_points: int) -> Tuple[float, np.ndarray, np.ndarray]:
    # sin(theta - phi) is linear in x along each segment, with slope kappa
    thetas = turning_breakpoints(c) - phi
    frames = breakpoint_frames(c.with_start(ORIGIN))
    rot = cmath.exp(-1j * phi)
    xs = np.array([(f.p * rot).real for f in frames])
    if np.any(np.diff(xs) <= 0.0):
        raise NoAxis(f"curve is not a graph over the axis {phi}")
    b = float(xs[-1])
    grid = np.linspace(0.0, b, grid_points)
    return b, grid, np.interp(grid, xs, np.sin(thetas))


class Excavator:
    """Contraction of a condensed curve onto its Dubins limit.

    ``step(1)`` reproduces the input on the grid, ``step(0)`` is the
    arc-segment-arc curve with the same end frames.
    """

    def __init__(
        self,
        c: PiecewiseCurve,
        kappa0: float,
        grid_points: int = DEFAULT_GRID_POINTS,
        area_tol_factor: float = AREA_TOL_FACTOR,
    ) -> None:
        if not kappa0 > 0:
            raise ValueError(f"curvature bound must be positive, got {kappa0}")
        if grid_points < 3:
            raise ValueError("grid_points must be at least 3")
        profile = turning_profile(c)
        if profile.curve_class != CurveClass.CONDENSED:
            raise NotCondensed(f"excavator needs a condensed curve, amplitude is {profile.omega}")
        if not in_bounds(c, -kappa0, kappa0, "closed"):
            raise OutOfBounds(f"curve leaves the closed bounds [-{kappa0}, {kappa0}]")
        self.curve = c
        self.kappa0 = kappa0
        self.state = self._build_state(c, kappa0, profile, grid_points, area_tol_factor)

    @staticmethod
    def _build_state(c, kappa0, profile, grid_points, area_tol_factor) -> ExcavatorState:
        if profile.omega >= math.pi:
            raise NoAxis("no axis keeps the curve a graph")
        phi = 0.5 * (profile.theta_plus + profile.theta_minus)
        b, grid, S = _sine_profile(c, phi, grid_points)
        s0, sb = float(S[0]), float(S[-1])
        f = slope_of_sine(S)
        x = grid
        return ExcavatorState(
            start=c.start,
            phi=phi,
            b=b,
            kappa0=kappa0,
            grid=grid,
            f=f,
            r0=float(f[0]),
            rb=float(f[-1]),
            alpha_plus=-s0,
            alpha_minus=s0,
            beta_plus=kappa0 * b + sb,
            beta_minus=kappa0 * b - sb,
            g_plus=slope_of_sine(s0 + kappa0 * x),
            g_minus=slope_of_sine(s0 - kappa0 * x),
            h_plus=slope_of_sine(sb - kappa0 * (x - b)),
            h_minus=slope_of_sine(sb + kappa0 * (x - b)),
            m_minus=float(f.min()),
            m_plus=float(f.max()),
            a1=float(trapezoid(f, grid)),
            area_tol=area_tol_factor * b,
        )

    def _levels(self, s: float) -> Tuple[float, float]:
        st = self.state
        width = (st.m_plus - st.m_minus) * s
        t_min, t_max = st.m_minus, st.m_plus - width
        if t_max - t_min <= 0.0:
            return st.m_minus, st.m_minus + width

        def excess(t: float) -> float:
            return st.area(st.clip(t, t + width)) - st.a1

        tol = st.area_tol
        low_end, high_end = excess(t_min), excess(t_max)
        logger.debug("s=%.4f bracket [%g, %g] excess [%g, %g]", s, t_min, t_max, low_end, high_end)
        try:
            if low_end >= -tol:
                t_a = t_min
            else:
                t_a = brentq(lambda t: excess(t) + tol, t_min, t_max, xtol=1e-15)
            if high_end <= tol:
                t_b = t_max
            else:
                t_b = brentq(lambda t: excess(t) - tol, t_min, t_max, xtol=1e-15)
        except (ValueError, ArithmeticError) as exc:
            raise GridTooCoarse(f"no area level found at s={s}: {exc}") from exc
        t = 0.5 * (t_a + t_b)
        return t, t + width

    def step(self, s: float) -> ExcavatorStep:
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"homotopy parameter must lie in [0, 1], got {s}")
        st = self.state
        mu_minus, mu_plus = self._levels(s)
        slope = st.median(mu_minus, mu_plus)
        error = abs(st.area(slope) - st.a1)
        if error > 1e-8 * (1.0 + abs(st.a1)):
            raise GridTooCoarse(f"area drift {error:.3e} at s={s} exceeds tolerance")
        return ExcavatorStep(state=st, s=s, mu_minus=mu_minus, mu_plus=mu_plus, slope=slope)

    def trace(self, n_steps: int = DEFAULT_STEPS) -> HomotopyTrace:
        if n_steps < 1:
            raise ValueError("n_steps must be at least 1")
        grid = [k / n_steps for k in range(n_steps + 1)]
        steps = [self.step(s) for s in grid]
        return HomotopyTrace(
            s=tuple(grid),
            curves=tuple(step.sampled() for step in steps),
            diagnostics=tuple(step.diagnostics() for step in steps),
        )


def excavator_trace(
    c: PiecewiseCurve,
    kappa0: float,
    n_steps: int = DEFAULT_STEPS,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> HomotopyTrace:
    return Excavator(c, kappa0, grid_points).trace(n_steps)


# closed-form limit of the contraction


def _profile_nodes(sigma: float, b: float, s0: float, sb: float, kappa0: float):
    def lower(x):
        return max(s0 - kappa0 * x, sb + kappa0 * (x - b))

    def upper(x):
        return min(s0 + kappa0 * x, sb - kappa0 * (x - b))

    def value(x):
        return min(max(sigma, lower(x)), upper(x))

    cuts = {
        0.0,
        b,
        (s0 - sb + kappa0 * b) / (2.0 * kappa0),
        (sb - s0 + kappa0 * b) / (2.0 * kappa0),
        (sigma - s0) / kappa0,
        (s0 - sigma) / kappa0,
        b + (sb - sigma) / kappa0,
        b + (sigma - sb) / kappa0,
    }
    xs = sorted(x for x in cuts if 0.0 <= x <= b)
    return xs, [value(x) for x in xs]


def _profile_area(xs, values) -> float:
    """Height gained over the profile; infinite once a cell is vertical."""
    total = 0.0
    for x0, x1, a, c in zip(xs[:-1], xs[1:], values[:-1], values[1:]):
        dx = x1 - x0
        if dx <= 0.0:
            continue
        denominator = math.sqrt(max(0.0, 1.0 - a * a)) + math.sqrt(max(0.0, 1.0 - c * c))
        if denominator == 0.0:
            # both ends at heading +-pi/2 over a positive width
            return math.copysign(math.inf, a)
        total += dx * (a + c) / denominator
    return total


def _profile_curve(xs, values, kappa0: float) -> Optional[PiecewiseCurve]:
    pairs: List[Tuple[float, float]] = []
    for x0, x1, a, c in zip(xs[:-1], xs[1:], values[:-1], values[1:]):
        dx = x1 - x0
        if dx <= 0.0:
            continue
        delta = c - a
        if delta == 0.0:
            if abs(a) >= 1.0:
                return None
            kappa, length = 0.0, dx / math.sqrt(1.0 - a * a)
        else:
            kappa = delta / dx
            if abs(abs(kappa) - kappa0) <= _KAPPA_SNAP * kappa0:
                kappa = math.copysign(kappa0, kappa)
            length = (math.asin(c) - math.asin(a)) / kappa
        if length <= 0.0:
            continue
        if pairs and pairs[-1][0] == kappa:
            pairs[-1] = (kappa, pairs[-1][1] + length)
        else:
            pairs.append((kappa, length))
    if not pairs:
        return None
    return PiecewiseCurve.from_pairs(pairs)


def _axes(theta1: float, count: int) -> List[float]:
    lo = max(0.0, theta1) - 0.5 * math.pi
    hi = min(0.0, theta1) + 0.5 * math.pi
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    axes = [centre]
    for k in range(1, count // 2 + 1):
        offset = half * k / (count // 2 + 1)
        axes.extend([centre - offset, centre + offset])
    return axes


def _along_axis(local: Frame, theta1: float, phi: float, kappa0: float) -> Optional[PiecewiseCurve]:
    rotated = local.p * cmath.exp(-1j * phi)
    b, target = rotated.real, rotated.imag
    if not b > 0.0:
        return None
    s0, sb = math.sin(-phi), math.sin(theta1 - phi)
    if abs(s0 - sb) > kappa0 * b * (1.0 + 1e-12):
        return None

    def excess(sigma: float) -> float:
        return _profile_area(*_profile_nodes(sigma, b, s0, sb, kappa0)) - target

    slack = 1e-13 * max(1.0, b)
    low, high = excess(-1.0), excess(1.0)
    if low > slack or high < -slack:
        return None
    if low >= 0.0:
        sigma = -1.0
    elif high <= 0.0:
        sigma = 1.0
    else:
        # an infinite end means a vertical plateau; bracket just inside it
        lo = -1.0 if math.isfinite(low) else -_LEVEL_EDGE
        hi = 1.0 if math.isfinite(high) else _LEVEL_EDGE
        lo_excess, hi_excess = excess(lo), excess(hi)
        if lo_excess >= 0.0:
            sigma = lo
        elif hi_excess <= 0.0:
            sigma = hi
        else:
            try:
                sigma = brentq(excess, lo, hi, xtol=1e-15)
            except (ValueError, ArithmeticError) as exc:
                raise NoAxis(f"level search failed on axis {phi}: {exc}") from exc
    xs, values = _profile_nodes(sigma, b, s0, sb, kappa0)
    return _profile_curve(xs, values, kappa0)


def dubins_condensed(
    Q: Frame,
    kappa0: float = 1.0,
    *,
    start: Frame = ORIGIN,
    axes: int = _AXIS_SCAN,
) -> PiecewiseCurve:
    """Shortest condensed curve from start to Q with |kappa| <= kappa0.

    Solved in closed form: along an admissible axis the sine of the heading
    is a level clamped between the kappa0-lines through its end values.
    """
    if not kappa0 > 0:
        raise ValueError(f"curvature bound must be positive, got {kappa0}")
    local = frame_mul(frame_inv(start), Q)
    theta1 = local.theta
    if abs(theta1) >= math.pi:
        raise Unreachable("condensed curves need |theta1| < pi")
    verdict = condensed_contains(local.p, theta1, "closed", kappa0=kappa0)
    if verdict.status == RegionStatus.OUTSIDE:
        raise Unreachable(f"{Q} is not reachable by a condensed curve with bound {kappa0}")
    if local.p == 0 and theta1 == 0.0:
        raise Unreachable("start and end frames coincide")
    tol = 1e-7 * max(1.0, abs(local.p))
    for phi in _axes(theta1, axes):
        shape = _along_axis(local, theta1, phi, kappa0)
        if shape is None:
            continue
        if not end_frame(shape).close_to(local, tol):
            logger.debug("axis %.6f gave a curve missing the target frame", phi)
            continue
        return shape.with_start(start)
    raise NoAxis(f"no condensed minimizer found for {Q}")
