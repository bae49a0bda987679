from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from math import acos, atan2, cos, floor, sin, sqrt
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .curve import ArcSegment, PiecewiseCurve, end_frame
from .geom import ORIGIN, Frame, frame_inv, frame_mul

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
_WRAP_TOL = 1e-12
_TIE_TOL = 1e-12
_SQUARE_TOL = 1e-10

# normalized (alpha, beta, d) -> (t, p, q) or None
WordSolver = Callable[[float, float, float], Optional[Tuple[float, float, float]]]


class Unreachable(ValueError):
    pass


def mod2pi(theta: float) -> float:
    value = theta - TWO_PI * floor(theta * 0.5 / math.pi)
    if value >= TWO_PI - _WRAP_TOL:
        return 0.0
    return value


def _lsl(alpha: float, beta: float, d: float):
    sa, sb, ca, cb = sin(alpha), sin(beta), cos(alpha), cos(beta)
    p_squared = 2 + d * d - 2 * cos(alpha - beta) + 2 * d * (sa - sb)
    if p_squared < -_SQUARE_TOL:
        return None
    tmp = atan2(cb - ca, d + sa - sb)
    return mod2pi(-alpha + tmp), sqrt(max(p_squared, 0.0)), mod2pi(beta - tmp)


def _rsr(alpha: float, beta: float, d: float):
    sa, sb, ca, cb = sin(alpha), sin(beta), cos(alpha), cos(beta)
    p_squared = 2 + d * d - 2 * cos(alpha - beta) + 2 * d * (sb - sa)
    if p_squared < -_SQUARE_TOL:
        return None
    tmp = atan2(ca - cb, d - sa + sb)
    return mod2pi(alpha - tmp), sqrt(max(p_squared, 0.0)), mod2pi(-beta + tmp)


def _lsr(alpha: float, beta: float, d: float):
    sa, sb, ca, cb = sin(alpha), sin(beta), cos(alpha), cos(beta)
    p_squared = -2 + d * d + 2 * cos(alpha - beta) + 2 * d * (sa + sb)
    if p_squared < -_SQUARE_TOL:
        return None
    p = sqrt(max(p_squared, 0.0))
    tmp = atan2(-ca - cb, d + sa + sb) - atan2(-2.0, p)
    return mod2pi(-alpha + tmp), p, mod2pi(-mod2pi(beta) + tmp)


def _rsl(alpha: float, beta: float, d: float):
    sa, sb, ca, cb = sin(alpha), sin(beta), cos(alpha), cos(beta)
    p_squared = d * d - 2 + 2 * cos(alpha - beta) - 2 * d * (sa + sb)
    if p_squared < -_SQUARE_TOL:
        return None
    p = sqrt(max(p_squared, 0.0))
    tmp = atan2(ca + cb, d - sa - sb) - atan2(2.0, p)
    return mod2pi(alpha - tmp), p, mod2pi(beta - tmp)


def _rlr(alpha: float, beta: float, d: float):
    sa, sb, ca, cb = sin(alpha), sin(beta), cos(alpha), cos(beta)
    tmp = (6.0 - d * d + 2.0 * cos(alpha - beta) + 2.0 * d * (sa - sb)) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = mod2pi(TWO_PI - acos(tmp))
    t = mod2pi(alpha - atan2(ca - cb, d - sa + sb) + mod2pi(p / 2.0))
    return t, p, mod2pi(alpha - beta - t + mod2pi(p))


def _lrl(alpha: float, beta: float, d: float):
    sa, sb, ca, cb = sin(alpha), sin(beta), cos(alpha), cos(beta)
    tmp = (6.0 - d * d + 2.0 * cos(alpha - beta) + 2.0 * d * (-sa + sb)) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = mod2pi(TWO_PI - acos(tmp))
    t = mod2pi(-alpha - atan2(ca - cb, d + sa - sb) + p / 2.0)
    return t, p, mod2pi(mod2pi(beta) - alpha - t + mod2pi(p))


WORDS: Dict[str, WordSolver] = {
    "LSL": _lsl,
    "RSR": _rsr,
    "LSR": _lsr,
    "RSL": _rsl,
    "RLR": _rlr,
    "LRL": _lrl,
}
CSC_WORDS = ("LSL", "RSR", "LSR", "RSL")

_LETTER_SIGN = {"L": 1.0, "R": -1.0, "S": 0.0}


@dataclass(frozen=True)
class DubinsCandidate:
    word: str
    curve: PiecewiseCurve
    arcs: Tuple[float, ...]

    @property
    def length(self) -> float:
        return self.curve.length

    @property
    def first_arc(self) -> float:
        return self.arcs[0]


def _build(word: str, values: Tuple[float, float, float], kappa0: float) -> Optional[PiecewiseCurve]:
    segs: List[ArcSegment] = []
    for letter, value in zip(word, values):
        length = value / kappa0
        if length <= 0.0:
            continue
        segs.append(ArcSegment(_LETTER_SIGN[letter] * kappa0, length))
    if not segs:
        return None
    return PiecewiseCurve(ORIGIN, tuple(segs))


def candidates(
    Q: Frame,
    kappa0: float,
    words: Sequence[str] = tuple(WORDS),
    *,
    start: Frame = ORIGIN,
    tol: float = 1e-9,
) -> List[DubinsCandidate]:
    """All word solutions from start to Q whose end frame checks out."""
    if not kappa0 > 0:
        raise ValueError(f"curvature bound must be positive, got {kappa0}")
    local = frame_mul(frame_inv(start), Q)
    dx, dy = local.p.real, local.p.imag
    d = math.hypot(dx, dy) * kappa0
    theta = mod2pi(atan2(dy, dx))
    alpha = mod2pi(-theta)
    beta = mod2pi(local.theta - theta)
    found: List[DubinsCandidate] = []
    for word in words:
        values = WORDS[word](alpha, beta, d)
        if values is None:
            continue
        curve = _build(word, values, kappa0)
        if curve is None:
            continue
        if not end_frame(curve).close_to(local, tol * max(1.0, abs(local.p))):
            logger.debug("discarding %s candidate with mismatched end frame", word)
            continue
        arcs = tuple(v for letter, v in zip(word, values) if letter != "S")
        found.append(DubinsCandidate(word, curve.with_start(start), arcs))
    return found


def _select(found: List[DubinsCandidate]) -> DubinsCandidate:
    best = min(found, key=lambda cand: (cand.length, cand.first_arc))
    ties = [
        cand
        for cand in found
        if cand.curve.segs != best.curve.segs and abs(cand.length - best.length) <= _TIE_TOL
    ]
    if ties:
        logger.warning(
            "Dubins word tie between %s and %s",
            word_of(best.curve),
            ", ".join(word_of(cand.curve) for cand in ties),
        )
        best = min([best, *ties], key=lambda cand: cand.first_arc)
    return best


def dubins_csc_oracle(Q: Frame, kappa0: float = 1.0, *, start: Frame = ORIGIN) -> PiecewiseCurve:
    """Shortest arc-segment-arc path whose arcs each turn by less than pi."""
    found = [
        cand
        for cand in candidates(Q, kappa0, CSC_WORDS, start=start)
        if all(arc < math.pi for arc in cand.arcs)
    ]
    if not found:
        raise Unreachable(f"no arc-segment-arc path with short arcs reaches {Q}")
    return _select(found).curve


def dubins_shortest(
    Q: Frame,
    kappa0: float = 1.0,
    words: Sequence[str] = tuple(WORDS),
    *,
    start: Frame = ORIGIN,
) -> PiecewiseCurve:
    found = candidates(Q, kappa0, words, start=start)
    if not found:
        raise Unreachable(f"no Dubins word reaches {Q}")
    return _select(found).curve


def word_of(c: PiecewiseCurve) -> str:
    letters = []
    for seg in c.segs:
        letter = "S" if seg.kappa == 0.0 else ("L" if seg.kappa > 0 else "R")
        if not letters or letters[-1] != letter:
            letters.append(letter)
    return "".join(letters)
