from __future__ import annotations

import logging
import math
from dataclasses import dataclass, asdict
from typing import Any, Dict, List, Optional

from .curve import (
    CurveClass,
    FrameMismatch,
    PiecewiseCurve,
    SeedLike,
    concat,
    end_frame,
    make_rng,
    random_curve,
    turning_profile,
)
from .dubins import Unreachable, dubins_csc_oracle, dubins_shortest
from .geom import Frame

logger = logging.getLogger(__name__)

_TURNING_TOL = 1e-9


@dataclass(frozen=True)
class LengthGapResult:
    q: complex
    theta1: float
    n_condensed: int
    n_diffuse: int
    max_condensed_length: float
    omega_hat: float
    secant_bound: float
    min_diffuse_length: float
    bound_holds: bool
    gap_holds: bool

    def as_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["q"] = {"x": self.q.real, "y": self.q.imag}
        return data


def _completed(prefix: PiecewiseCurve, tail: PiecewiseCurve) -> Optional[PiecewiseCurve]:
    try:
        return concat(prefix, tail, tol=1e-9)
    except FrameMismatch:
        return None


def _sample(
    Q: Frame,
    theta1: float,
    wanted: CurveClass,
    n_samples: int,
    kappa0: float,
    prefix_len: float,
    rng,
) -> List[PiecewiseCurve]:
    found: List[PiecewiseCurve] = []
    attempts = 0
    while len(found) < n_samples and attempts < 20 * n_samples:
        attempts += 1
        prefix = random_curve(-kappa0, kappa0, 2, prefix_len, rng)
        start = end_frame(prefix)
        try:
            if wanted == CurveClass.CONDENSED:
                tail = dubins_csc_oracle(Q, kappa0, start=start)
            else:
                tail = dubins_shortest(Q, kappa0, start=start)
        except Unreachable:
            continue
        c = _completed(prefix, tail)
        if c is None:
            continue
        profile = turning_profile(c)
        if profile.curve_class != wanted or abs(profile.theta1 - theta1) > _TURNING_TOL:
            continue
        found.append(c)
    if len(found) < n_samples:
        logger.info("collected %d of %d %s curves", len(found), n_samples, wanted.value)
    return found


def length_gap_experiment(
    Q: Frame = Frame(3.0),
    theta1: float = 0.0,
    n_samples: int = 10_000,
    seed: SeedLike = 0,
    margin: float = 1e-3,
) -> LengthGapResult:
    """Compare lengths of random condensed and diffuse curves ending at Q.

    Condensed lengths should stay below |q| sec(omega/2) for their largest
    amplitude omega, and below every diffuse length; failures are logged.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = make_rng(seed)
    kappa0 = 1.0 - margin
    q = Q.p
    condensed = _sample(Q, theta1, CurveClass.CONDENSED, n_samples, kappa0, 0.5, rng)
    diffuse = _sample(Q, theta1, CurveClass.DIFFUSE, n_samples, kappa0, 4.0, rng)
    max_condensed = max((c.length for c in condensed), default=math.nan)
    omega_hat = max((turning_profile(c).omega for c in condensed), default=math.nan)
    secant = abs(q) / math.cos(0.5 * omega_hat) if omega_hat < math.pi else math.inf
    min_diffuse = min((c.length for c in diffuse), default=math.inf)
    result = LengthGapResult(
        q=q,
        theta1=theta1,
        n_condensed=len(condensed),
        n_diffuse=len(diffuse),
        max_condensed_length=max_condensed,
        omega_hat=omega_hat,
        secant_bound=secant,
        min_diffuse_length=min_diffuse,
        bound_holds=bool(max_condensed <= secant),
        gap_holds=bool(max_condensed < min_diffuse),
    )
    if not (result.bound_holds and result.gap_holds):
        logger.warning(
            "length gap experiment failed: condensed max %.6f, secant %.6f, diffuse min %.6f",
            max_condensed,
            secant,
            min_diffuse,
        )
    return result
