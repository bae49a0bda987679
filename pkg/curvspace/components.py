from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from .curve import (
    CurveClass,
    FrameMismatch,
    InvalidBounds,
    OutOfBounds,
    PiecewiseCurve,
    end_frame,
    in_bounds,
    turning_profile,
)
from .geom import Frame, frame_distance
from .normalize import Bounds, CanonicalType, NormalizationRecord, apply_frames, canonicalize, restore_curve
from .regions import disconnection_test

logger = logging.getLogger(__name__)

TURNING_TOL = 1e-9
FRAME_TOL = 1e-9
_HALF_TURN_TOL = 1e-12
WITNESS_BINS = (16, 64, 256)

CONDENSED_COMPONENT = "condensed_component"
DIFFUSE_COMPONENT = "diffuse_component"
SINGLE = "single"


class TurningIncompatible(ValueError):
    pass


@dataclass(frozen=True)
class ComponentReport:
    """Answer of a component query; ``count`` is None when it is unknown."""

    mode: str
    count: Optional[int]
    labels: Tuple[str, ...]
    canonical: NormalizationRecord
    theta1: float
    variant: str = "open"
    q_hat: Optional[Frame] = None
    remark_based: bool = False
    witnesses: Tuple[PiecewiseCurve, ...] = field(default=(), compare=False)

    @property
    def count_label(self) -> str:
        return "unknown" if self.count is None else str(self.count)


def _check_turning(P: Frame, Q: Frame, theta1: float) -> None:
    if abs(cmath.exp(1j * theta1) - Q.w * P.w.conjugate()) > TURNING_TOL:
        raise TurningIncompatible(
            f"theta1={theta1} is incompatible with the headings of {P} and {Q}"
        )


def _check_variant(b: Bounds, variant: str) -> None:
    if variant not in ("open", "closed"):
        raise ValueError(f"unknown variant: {variant}")
    if variant == "closed" and not (math.isfinite(b.kappa1) and math.isfinite(b.kappa2)):
        raise InvalidBounds("closed bounds must be finite")


def _cross_check(rec: NormalizationRecord, P: Frame, Q: Frame) -> None:
    moved_p, moved_q = apply_frames(rec.pipeline, P, Q)
    drift = max(abs(moved_p.p), frame_distance(moved_q, rec.q0))
    if drift > 1e-8 * max(1.0, abs(rec.q0.p)):
        logger.warning("normalized frame disagrees with the closed form by %.3e", drift)


def _edge_integrals(grid: np.ndarray) -> np.ndarray:
    # integral of e^{i theta} over each bin
    return -1j * np.diff(np.exp(1j * grid))


def convex_witness(
    q0: complex,
    theta1: float,
    canonical: CanonicalType,
    bins: int = WITNESS_BINS[0],
) -> Optional[PiecewiseCurve]:
    """A canonical curve from the origin to (q0, e^{i theta1}) with radius of
    curvature piecewise constant in the tangent angle, or None.

    Feasibility is a linear program in the radii; the largest uniform margin
    from the radius bounds is maximized.
    """
    if theta1 <= 0.0:
        return None
    if canonical == CanonicalType.SHIFTED:
        limit = 1.0
    elif canonical == CanonicalType.HALF_LINE:
        limit = math.inf
    else:
        raise ValueError(f"no convex witness for canonical type {canonical.value}")
    grid = np.linspace(0.0, theta1, bins + 1)
    edges = _edge_integrals(grid)
    widths = np.diff(grid)
    cap = 1.0 if math.isinf(limit) else 0.5 * limit
    n = bins
    # variables: radii rho_0..rho_{n-1} and the margin t
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    rows = [np.concatenate((-np.eye(n), np.ones((n, 1))), axis=1)]
    rhs = [np.zeros(n)]
    if math.isfinite(limit):
        rows.append(np.concatenate((np.eye(n), np.ones((n, 1))), axis=1))
        rhs.append(np.full(n, limit))
    a_eq = np.vstack((np.append(edges.real, 0.0), np.append(edges.imag, 0.0)))
    b_eq = np.array([q0.real, q0.imag])
    result = linprog(
        cost,
        A_ub=np.vstack(rows),
        b_ub=np.concatenate(rhs),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=[(0.0, None)] * n + [(0.0, cap)],
        method="highs",
    )
    if result.status != 0 or result.x[-1] <= 1e-12:
        logger.debug("convex witness LP with %d bins: %s", bins, result.message)
        return None
    rho = result.x[:n]
    residual = b_eq - a_eq[:, :n] @ rho
    rho = rho + np.linalg.lstsq(a_eq[:, :n], residual, rcond=None)[0]
    if rho.min() <= 0.0 or rho.max() >= limit:
        return None
    witness = PiecewiseCurve.from_pairs(zip(1.0 / rho, rho * widths))
    target = Frame(q0, cmath.exp(1j * theta1))
    if not end_frame(witness).close_to(target, FRAME_TOL * max(1.0, abs(q0))):
        logger.debug("convex witness misses its target frame")
        return None
    return witness


def _signed_report(theta1: float, variant: str, rec: NormalizationRecord) -> ComponentReport:
    canonical_theta = rec.turning_sign * theta1
    if canonical_theta <= 0.0:
        return ComponentReport(
            mode="per_turning",
            count=0,
            labels=(),
            canonical=rec,
            theta1=theta1,
            variant=variant,
        )
    for bins in WITNESS_BINS:
        witness = convex_witness(rec.q0.p, canonical_theta, rec.canonical_type, bins)
        if witness is not None:
            restored = restore_curve(witness, rec)
            return ComponentReport(
                mode="per_turning",
                count=1,
                labels=(SINGLE,),
                canonical=rec,
                theta1=theta1,
                variant=variant,
                witnesses=(restored,),
            )
    logger.info("no witness found for theta1=%s in %s", theta1, rec.canonical_type.value)
    return ComponentReport(
        mode="per_turning",
        count=None,
        labels=(),
        canonical=rec,
        theta1=theta1,
        variant=variant,
    )


def component_count(
    P: Frame, Q: Frame, b: Bounds, theta1: float, variant: str = "open"
) -> ComponentReport:
    """Number of components of the space of curves from P to Q with total turning theta1."""
    _check_turning(P, Q, theta1)
    _check_variant(b, variant)
    rec = canonicalize(P, Q, b)
    _cross_check(rec, P, Q)
    if rec.canonical_type == CanonicalType.UNCONSTRAINED:
        return ComponentReport(
            mode="per_turning", count=1, labels=(SINGLE,), canonical=rec, theta1=theta1, variant=variant
        )
    if rec.canonical_type != CanonicalType.SYMMETRIC:
        return _signed_report(theta1, variant, rec)
    q_hat = rec.q0
    remark_based = abs(abs(theta1) - math.pi) <= _HALF_TURN_TOL
    if remark_based:
        logger.warning("connectivity at |theta1| = pi is taken from a remark, not a theorem")
        split = False
    else:
        split = disconnection_test(q_hat.p, theta1, variant)
    return ComponentReport(
        mode="fixed_turning",
        count=2 if split else 1,
        labels=(CONDENSED_COMPONENT, DIFFUSE_COMPONENT) if split else (SINGLE,),
        canonical=rec,
        theta1=theta1,
        variant=variant,
        q_hat=q_hat,
        remark_based=remark_based,
    )


def same_component(
    c1: PiecewiseCurve, c2: PiecewiseCurve, b: Bounds, variant: str = "open"
) -> bool:
    _check_variant(b, variant)
    if not c1.start.close_to(c2.start, FRAME_TOL):
        raise FrameMismatch("curves start at different frames")
    end1, end2 = end_frame(c1), end_frame(c2)
    if not end1.close_to(end2, FRAME_TOL * max(1.0, abs(end1.p))):
        raise FrameMismatch("curves end at different frames")
    for name, c in (("first", c1), ("second", c2)):
        if not in_bounds(c, b.kappa1, b.kappa2, variant):
            raise OutOfBounds(f"{name} curve leaves the bounds ({b.kappa1}, {b.kappa2})")
    p1, p2 = turning_profile(c1), turning_profile(c2)
    if abs(p1.theta1 - p2.theta1) > TURNING_TOL:
        return False
    if b.unconstrained or b.sign_class != "neg":
        return True
    theta1 = p1.theta1
    if abs(theta1) >= math.pi:
        return True
    rec = canonicalize(c1.start, end1, b)
    if not disconnection_test(rec.q0.p, theta1, variant):
        return True
    condensed1 = p1.curve_class == CurveClass.CONDENSED
    condensed2 = p2.curve_class == CurveClass.CONDENSED
    return condensed1 == condensed2
