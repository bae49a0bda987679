from __future__ import annotations

import cmath
import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .components import component_count, same_component
from .config import Settings
from .curve import (
    CurveClass,
    PiecewiseCurve,
    concat,
    end_frame,
    in_bounds,
    motion,
    random_critical_curve,
    random_curve,
    reflect,
    reverse,
    turning_profile,
)
from .deform import attach_eight, spread_eights, spread_loops
from .dubins import Unreachable, dubins_csc_oracle, word_of
from .excavator import Excavator, GridTooCoarse, NoAxis, dubins_condensed
from .experiments import length_gap_experiment
from .geom import ORIGIN, Frame, frame_distance, frame_inv, frame_mul, wrap_angle
from .normalize import (
    Bounds,
    admissible_u_interval,
    apply_frames,
    canonicalize,
    normal_translate,
    transform_curve,
)
from .regions import (
    Amplitude,
    CondensedMinus,
    CondensedPlus,
    Critical,
    RegionStatus,
    SignString,
    amplitude_circle_test,
    any_critical_contains,
    bounding_circle,
    condensed_contains,
    disconnection_test,
    extremal_boundary_point,
    extremal_curve,
)
from .serialize import curve_from_json, curve_to_json
from .surfaces import SurfaceModel, lifts, surface_components

logger = logging.getLogger(__name__)

SUITES = (
    "geom",
    "curve",
    "normalize",
    "regions",
    "dubins",
    "excavator",
    "spread",
    "components",
    "surfaces",
    "length_bound",
)

FULL_SIZES: Dict[str, int] = {
    "frames": 1000,
    "curves": 1000,
    "translate": 1000,
    "normalize": 500,
    "condensed": 10_000,
    "critical": 1000,
    "family_grid": 100,
    "amplitude_grid": 100,
    "amplitude_samples": 10_000,
    "dubins": 200,
    "excavator": 100,
    "components": 1000,
    "coherence": 200,
    "length_bound": 10_000,
}

QUICK_SIZES: Dict[str, int] = {
    "frames": 50,
    "curves": 50,
    "translate": 50,
    "normalize": 40,
    "condensed": 300,
    "critical": 100,
    "family_grid": 20,
    "amplitude_grid": 20,
    "amplitude_samples": 300,
    "dubins": 10,
    "excavator": 3,
    "components": 100,
    "coherence": 20,
    "length_bound": 200,
}

CASE_NAMES = ("a", "b", "c", "d", "e")
SPREAD_COUNTS = (25, 50, 100, 200)
DUBINS_THRESHOLD = ((0.5, 2), (1.0, 2), (2.0, 2), (3.0, 2), (3.999, 2), (4.0, 2), (4.001, 1), (5.0, 1), (10.0, 1))


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def as_dict(self) -> Dict[str, object]:
        data = asdict(self)
        for key in ("measured", "tolerance"):
            if not math.isfinite(data[key]):
                data[key] = str(data[key])
        return data


def _random_frame(rng: np.random.Generator, scale: float = 3.0) -> Frame:
    x, y = rng.normal(scale=scale, size=2)
    return Frame.from_angle(complex(x, y), float(rng.uniform(-math.pi, math.pi)))


def random_bounds(rng: np.random.Generator, case: str) -> Bounds:
    """Finite random bounds of one of the five sign configurations."""
    gap = float(rng.uniform(0.1, 3.0))
    if case == "a":
        return Bounds(-float(rng.uniform(0.1, 3.0)), float(rng.uniform(0.1, 3.0)))
    if case == "b":
        k1 = float(rng.uniform(0.1, 2.0))
        return Bounds(k1, k1 + gap)
    if case == "c":
        return Bounds(0.0, gap)
    if case == "d":
        k2 = -float(rng.uniform(0.1, 2.0))
        return Bounds(k2 - gap, k2)
    if case == "e":
        return Bounds(-gap, 0.0)
    raise ValueError(f"unknown bounds case: {case}")


def _random_condensed(rng: np.random.Generator, kappa: float = 1.0, max_omega: float = math.pi) -> PiecewiseCurve:
    while True:
        c = random_curve(-kappa, kappa, int(rng.integers(1, 5)), 1.5, rng)
        profile = turning_profile(c)
        if profile.curve_class == CurveClass.CONDENSED and profile.omega < max_omega:
            return c


def _digest(settings: Settings) -> str:
    text = json.dumps(asdict(settings), sort_keys=True, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class Verifier:
    """Runs the cross-check suites and collects one result per check."""

    def __init__(self, settings: Settings, seed: int, quick: bool = False) -> None:
        self.settings = settings
        self.seed = seed
        self.quick = quick
        self.sizes = QUICK_SIZES if quick else FULL_SIZES
        self._results: List[CheckResult] = []
        self._suite = ""

    def run(self, suites: Optional[Sequence[str]] = None) -> List[CheckResult]:
        selected = list(suites) if suites else list(SUITES)
        unknown = [name for name in selected if name not in SUITES]
        if unknown:
            raise ValueError(f"unknown suites: {', '.join(unknown)}")
        self._results = []
        for name in selected:
            self._suite = name
            before = len(self._results)
            runner: Callable[[np.random.Generator], None] = getattr(self, f"_suite_{name}")
            runner(np.random.default_rng([self.seed, SUITES.index(name)]))
            mine = self._results[before:]
            failed = sum(1 for r in mine if not r.passed)
            logger.info("suite %s: %d checks, %d failed", name, len(mine), failed)
        return list(self._results)

    def write(self, out_dir: Path, results: Sequence[CheckResult], suites: Sequence[str]) -> Dict[str, object]:
        out_dir.mkdir(parents=True, exist_ok=True)
        report = {
            "generated_at": datetime.now(timezone.utc).isoformat(),
            "passed": all(r.passed for r in results),
            "checks": [r.as_dict() for r in results],
        }
        manifest = {
            "suites": list(suites),
            "seed": self.seed,
            "quick": self.quick,
            "sizes": dict(self.sizes),
            "settings_sha256": _digest(self.settings),
        }
        (out_dir / "report.json").write_text(
            json.dumps(report, ensure_ascii=False, sort_keys=True, indent=2),
            encoding="utf-8",
        )
        (out_dir / "run_manifest.json").write_text(
            json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2),
            encoding="utf-8",
        )
        return report

    def _check(self, name: str, measured: float, tolerance: float, detail: str = "") -> CheckResult:
        result = CheckResult(
            suite=self._suite,
            name=name,
            passed=bool(measured <= tolerance),
            measured=float(measured),
            tolerance=float(tolerance),
            detail=detail,
        )
        if not result.passed:
            logger.warning("%s/%s failed: %g > %g %s", self._suite, name, measured, tolerance, detail)
        self._results.append(result)
        return result

    def _count(self, name: str, failures: int, total: int) -> CheckResult:
        return self._check(name, failures, 0, f"{failures} of {total} failed")

    # suites

    def _suite_geom(self, rng: np.random.Generator) -> None:
        worst_assoc = worst_inverse = 0.0
        for _ in range(self.sizes["frames"]):
            f, g, h = (_random_frame(rng) for _ in range(3))
            left = frame_mul(frame_mul(f, g), h)
            right = frame_mul(f, frame_mul(g, h))
            worst_assoc = max(worst_assoc, frame_distance(left, right))
            worst_inverse = max(worst_inverse, frame_distance(frame_mul(f, frame_inv(f)), ORIGIN))
        self._check("associativity", worst_assoc, 1e-12)
        self._check("inverse", worst_inverse, 1e-12)

    def _suite_curve(self, rng: np.random.Generator) -> None:
        tol = self.settings.tolerances.frame
        sampling = self.settings.sampling
        worst_concat = worst_reverse = worst_reflect = 0.0
        json_failures = 0
        total = self.sizes["curves"]
        for _ in range(total):
            start = _random_frame(rng)
            c1 = random_curve(-2.0, 2.0, sampling.n_segs, sampling.max_seg_len, rng, start=start)
            c2 = random_curve(-2.0, 2.0, sampling.n_segs, sampling.max_seg_len, rng, start=end_frame(c1))
            joined = concat(c1, c2)
            expected = frame_mul(end_frame(c1), motion(c2.segs))
            worst_concat = max(worst_concat, frame_distance(end_frame(joined), expected))
            back = reverse(reverse(c1))
            worst_reverse = max(worst_reverse, frame_distance(end_frame(back), end_frame(c1)))
            mirrored = end_frame(reflect(c1))
            worst_reflect = max(worst_reflect, frame_distance(mirrored, end_frame(c1).conjugate()))
            restored = curve_from_json(json.loads(json.dumps(curve_to_json(c1))))
            if restored.segs != c1.segs or frame_distance(restored.start, c1.start) > 1e-15:
                json_failures += 1
        self._check("concat_end_frame", worst_concat, tol * 10)
        self._check("reverse_involution", worst_reverse, tol)
        self._check("reflect_conjugates", worst_reflect, tol)
        self._count("json_round_trip", json_failures, total)

    def _suite_normalize(self, rng: np.random.Generator) -> None:
        worst_kappa = worst_end = worst_turn = worst_trip = 0.0
        for _ in range(self.sizes["translate"]):
            b = random_bounds(rng, CASE_NAMES[int(rng.integers(0, 5))])
            lo, hi = admissible_u_interval(b)
            u = float(rng.uniform(max(lo, -5.0), min(hi, 5.0)))
            c = random_curve(b.kappa1, b.kappa2, 3, 1.0, rng, start=_random_frame(rng), margin=1e-3)
            moved = normal_translate(c, u)
            for seg, image in zip(c.segs, moved.segs):
                expected = seg.kappa / (1.0 - u * seg.kappa)
                worst_kappa = max(worst_kappa, abs(image.kappa - expected) / max(1.0, abs(expected)))
            end = end_frame(c)
            target = Frame(end.p + 1j * u * end.w, end.w)
            worst_end = max(worst_end, frame_distance(end_frame(moved), target))
            worst_turn = max(worst_turn, abs(turning_profile(moved).theta1 - turning_profile(c).theta1))
            back = normal_translate(moved, -u)
            trip = frame_distance(back.start, c.start)
            for seg, image in zip(c.segs, back.segs):
                trip = max(trip, abs(seg.kappa - image.kappa), abs(seg.length - image.length))
            worst_trip = max(worst_trip, trip)
        self._check("translated_curvature", worst_kappa, 1e-12)
        self._check("translated_end_frame", worst_end, 1e-9)
        self._check("translated_turning", worst_turn, 1e-12)
        self._check("translate_round_trip", worst_trip, 1e-9)

        bound_failures = sign_failures = 0
        worst_q0 = worst_abs_turn = worst_origin = 0.0
        total = self.sizes["normalize"]
        for index in range(total):
            case = CASE_NAMES[index % 5]
            b = random_bounds(rng, case)
            P = _random_frame(rng)
            witness = random_curve(b.kappa1, b.kappa2, 3, 1.0, rng, start=P, margin=1e-3)
            Q = end_frame(witness)
            rec = canonicalize(P, Q, b)
            image = transform_curve(witness, rec)
            canonical = rec.canonical_bounds
            if not in_bounds(image, canonical.kappa1, canonical.kappa2, "open"):
                bound_failures += 1
            scale = max(1.0, abs(rec.q0.p))
            worst_q0 = max(worst_q0, frame_distance(end_frame(image), rec.q0) / scale)
            worst_origin = max(worst_origin, frame_distance(image.start, ORIGIN))
            before, after = turning_profile(witness).theta1, turning_profile(image).theta1
            worst_abs_turn = max(worst_abs_turn, abs(abs(after) - abs(before)))
            if abs(after - rec.turning_sign * before) > 1e-9 or rec.turning_sign != (-1 if case in "de" else 1):
                sign_failures += 1
        self._count("canonical_bounds", bound_failures, total)
        self._check("canonical_end_frame", worst_q0, 1e-9)
        self._check("canonical_start", worst_origin, 1e-9)
        self._check("canonical_turning_magnitude", worst_abs_turn, 1e-9)
        self._count("turning_sign", sign_failures, total)

    def _suite_regions(self, rng: np.random.Generator) -> None:
        tol = self.settings.tolerances.boundary
        total = self.sizes["condensed"]
        misses = 0
        for _ in range(total):
            c = _random_condensed(rng)
            theta1 = turning_profile(c).theta1
            if condensed_contains(end_frame(c).p, theta1, tol=tol).status == RegionStatus.OUTSIDE:
                misses += 1
        self._count("condensed_soundness", misses, total)

        total = self.sizes["critical"]
        misses = 0
        for _ in range(total):
            c = random_critical_curve(rng)
            theta1 = turning_profile(c).theta1
            if any_critical_contains(end_frame(c).p, theta1, tol=tol).status == RegionStatus.OUTSIDE:
                misses += 1
        self._count("critical_soundness", misses, total)

        worst = 0.0
        points = self.sizes["family_grid"]
        for theta1 in (0.0, 0.7, -1.3, 2.5):
            for t in np.linspace(0.005, 0.995, points):
                for family in self._families(theta1, float(t)):
                    closed_form = extremal_boundary_point(theta1, family)
                    traced = end_frame(extremal_curve(theta1, family))
                    circle = bounding_circle(theta1, family)
                    worst = max(worst, frame_distance(closed_form, traced), circle.distance(traced.p))
        self._check("extremal_families", worst, 1e-9)

        grid = np.linspace(-6.0, 6.0, self.sizes["amplitude_grid"])
        violations = 0
        for theta1 in (0.0, 1.0, -2.0):
            for x in grid:
                for y in grid:
                    q = complex(x, y)
                    if amplitude_circle_test(q, theta1, math.pi):
                        if any_critical_contains(q, theta1).status != RegionStatus.OUTSIDE:
                            violations += 1
        self._count("amplitude_circle_excludes_critical", violations, 3 * len(grid) ** 2)

        total = self.sizes["amplitude_samples"]
        violations = 0
        for _ in range(total):
            c = _random_condensed(rng)
            profile = turning_profile(c)
            if amplitude_circle_test(end_frame(c).p, profile.theta1, profile.omega):
                violations += 1
        self._count("amplitude_circle_lemma", violations, total)

        flips = [
            disconnection_test(4.0, 0.0, "open") is True,
            disconnection_test(4.0, 0.0, "closed") is False,
            disconnection_test(2 + 2j, 0.0, "open") is False,
            disconnection_test(2 + 2j, 0.0, "closed") is True,
        ]
        self._count("open_closed_flip", flips.count(False), len(flips))

    @staticmethod
    def _families(theta1: float, t: float):
        # parameter ranges are those of |theta1|; negative turnings are mirrored
        a = abs(theta1)
        yield CondensedPlus(a + t * (math.pi - a))
        yield CondensedMinus(a - math.pi + t * (math.pi - a))
        mu = a - math.pi + t * (math.pi - a)
        for text in ("-+", "+-", "-+-"):
            yield Critical(SignString.parse(text), mu)
        omega = 0.5 * (a + math.pi)
        yield Amplitude(omega, a - omega + t * (omega - a))

    def _suite_dubins(self, rng: np.random.Generator) -> None:
        total = self.sizes["dubins"]
        worst_gap = worst_excess = 0.0
        failures = 0
        for _ in range(total):
            c = _random_condensed(rng, max_omega=math.pi - 0.05)
            Q = end_frame(c)
            try:
                condensed = dubins_condensed(Q, 1.0)
                oracle = dubins_csc_oracle(Q, 1.0)
            except (Unreachable, NoAxis) as exc:
                failures += 1
                logger.debug("dubins comparison skipped: %s", exc)
                continue
            if turning_profile(condensed).curve_class != CurveClass.CONDENSED:
                failures += 1
            gap = abs(condensed.length - oracle.length)
            if gap > 1e-6:
                logger.debug("words %s vs %s differ by %.3e", word_of(condensed), word_of(oracle), gap)
            worst_gap = max(worst_gap, gap)
            worst_excess = max(worst_excess, condensed.length - c.length)
        self._check("condensed_vs_csc_length", worst_gap, 1e-6)
        self._check("condensed_is_shortest", worst_excess, 1e-9)
        self._count("condensed_solved", failures, total)

    def _suite_excavator(self, rng: np.random.Generator) -> None:
        cfg = self.settings.excavator
        total = self.sizes["excavator"]
        steps = 16 if self.quick else cfg.n_steps
        grid = [k / steps for k in range(steps + 1)]
        worst_end = worst_start = worst_amp = worst_len = worst_area = worst_limit = 0.0
        failures = 0
        for _ in range(total):
            c = _random_condensed(rng, max_omega=math.pi - 0.3)
            target = end_frame(c)
            try:
                excavator = Excavator(c, 1.0, cfg.grid_points, cfg.area_tol_factor)
                trace = [excavator.step(s) for s in grid]
                shortest = dubins_condensed(target, 1.0)
            except (GridTooCoarse, NoAxis, Unreachable) as exc:
                failures += 1
                logger.debug("excavator check failed: %s", exc)
                continue
            a1 = excavator.state.a1
            worst_end = max(worst_end, frame_distance(trace[0].end_frame(), target))
            worst_start = max(worst_start, frame_distance(trace[-1].end_frame(), target))
            amplitudes = np.array([step.amplitude for step in trace])
            lengths = np.array([step.length for step in trace])
            worst_amp = max(worst_amp, float(-np.diff(amplitudes).min(initial=0.0)))
            worst_len = max(worst_len, float(-np.diff(lengths).min(initial=0.0)))
            drift = max(abs(step.area - a1) for step in trace) / (1.0 + abs(a1))
            worst_area = max(worst_area, drift)
            worst_limit = max(worst_limit, abs(trace[0].length - shortest.length))
        self._check("limit_end_frame", worst_end, 1e-4)
        self._check("identity_end_frame", worst_start, 1e-4)
        self._check("amplitude_monotone", worst_amp, 1e-12)
        self._check("length_monotone", worst_len, 1e-12)
        self._check("area_conserved", worst_area, 1e-8)
        self._check("limit_matches_dubins", worst_limit, 1e-6)
        self._count("traces_completed", failures, total)

    def _suite_spread(self, rng: np.random.Generator) -> None:
        segment = PiecewiseCurve.from_pairs([(0.0, 10.0)])
        target = end_frame(segment)
        errors = []
        worst_end = 0.0
        for n in SPREAD_COUNTS:
            spread = spread_eights(segment, n)
            errors.append(float(np.max(np.abs(np.abs(spread.curvature) - 0.5))))
            worst_end = max(worst_end, frame_distance(spread.end, target))
        ratios = [b / a for a, b in zip(errors, errors[1:])]
        increases = sum(1 for a, b in zip(errors, errors[1:]) if b >= a)
        self._count("curvature_error_decreases", increases, len(ratios))
        self._check(
            "curvature_error_ratio",
            max(abs(r - 0.5) for r in ratios),
            0.1,
            "ratios " + ", ".join(f"{r:.4f}" for r in ratios),
        )
        self._check("spread_end_frame", worst_end, 1e-6)

        n = 50 if not self.quick else 10
        loops = spread_loops(segment, n)
        turning = float(loops.headings[-1] - loops.headings[0])
        self._check("loops_end_frame", frame_distance(loops.end, target), 1e-6)
        self._check("loops_turning", abs(turning - 2.0 * math.pi * n), 1e-6)

        base = random_curve(-1.0, 1.0, 3, 2.0, rng)
        worst_attach = 0.0
        for count in (1, 2):
            attached = attach_eight(base, count)
            worst_attach = max(worst_attach, frame_distance(end_frame(attached), end_frame(base)))
            worst_attach = max(
                worst_attach, abs(turning_profile(attached).theta1 - turning_profile(base).theta1)
            )
        self._check("attach_preserves_ends", worst_attach, 1e-9)

    def _suite_components(self, rng: np.random.Generator) -> None:
        mismatches = [
            x for x, expected in DUBINS_THRESHOLD
            if component_count(ORIGIN, Frame(complex(x)), Bounds(-1.0, 1.0), 0.0).count != expected
        ]
        self._count("dubins_threshold", len(mismatches), len(DUBINS_THRESHOLD))

        total = self.sizes["components"]
        disagreements = 0
        for _ in range(total):
            b = random_bounds(rng, "a")
            P, Q = _random_frame(rng, 2.0), _random_frame(rng, 2.0)
            principal = wrap_angle(cmath.phase(Q.w * P.w.conjugate()))
            theta1 = principal + 2.0 * math.pi * int(rng.integers(-1, 2))
            report = component_count(P, Q, b, theta1)
            _, moved_q = apply_frames(report.canonical.pipeline, P, Q)
            split = abs(theta1) < math.pi and disconnection_test(moved_q.p, theta1)
            if report.count != (2 if split else 1):
                disagreements += 1
        self._count("count_matches_regions", disagreements, total)

        total = self.sizes["coherence"]
        disagreements = 0
        for index in range(total):
            b = random_bounds(rng, CASE_NAMES[index % 5])
            P, Q = _random_frame(rng, 2.0), _random_frame(rng, 2.0)
            theta1 = wrap_angle(cmath.phase(Q.w * P.w.conjugate()))
            report = component_count(P, Q, b, theta1)
            rec = report.canonical
            canonical = component_count(ORIGIN, rec.q0, rec.canonical_bounds, rec.turning_sign * theta1)
            if canonical.count != report.count:
                disagreements += 1
        self._count("count_survives_normalization", disagreements, total)

        segment = PiecewiseCurve.from_pairs([(0.0, 3.0)])
        family = [
            segment,
            attach_eight(segment, 1),
            attach_eight(segment, 1, t0=0.3, eps=0.1),
            attach_eight(segment, 2, t0=0.7, eps=0.1),
        ]
        b = Bounds(-1.0, 1.0)
        related = [[same_component(x, y, b) for y in family] for x in family]
        size = len(family)
        broken = sum(1 for i in range(size) if not related[i][i])
        broken += sum(1 for i in range(size) for j in range(size) if related[i][j] != related[j][i])
        broken += sum(
            1
            for i in range(size)
            for j in range(size)
            for k in range(size)
            if related[i][j] and related[j][k] and not related[i][k]
        )
        broken += sum(1 for j in range(1, size) if related[0][j])
        self._count("same_component_equivalence", broken, size**3)

    def _suite_surfaces(self, rng: np.random.Generator) -> None:
        b = Bounds(-1.0, 1.0)
        cylinder = SurfaceModel.cylinder(3.0)
        reports = surface_components(cylinder, ORIGIN, ORIGIN, b, theta1=0.0, max_radius=7.0)
        expected = {3.0: 2, 6.0: 1}
        wrong = 0
        for x, count in expected.items():
            found = [r for lift, r in reports if abs(lift.p - x) < 1e-9]
            if len(found) != 1 or found[0].count != count:
                wrong += 1
        self._count("cylinder_lifts", wrong, len(expected))

        radius = 10.0
        torus = lifts(SurfaceModel.torus(4.0, 4j), ORIGIN, ORIGIN, radius)
        direct = sum(
            1 for m in range(-3, 4) for n in range(-3, 4) if abs(complex(4 * m, 4 * n)) <= radius
        )
        self._check("torus_lift_count", abs(len(torus) - direct), 0, f"{len(torus)} lifts, lattice {direct}")

        base = _random_frame(rng, 1.0)
        klein = SurfaceModel.klein(3.0, 3.0)
        images = lifts(klein, ORIGIN, base, 6.0)
        reflected = sum(1 for f in images if abs(f.w - base.w.conjugate()) < 1e-9)
        self._check("klein_has_reflected_lifts", 0 if reflected else 1, 0, f"{reflected} of {len(images)}")

    def _suite_length_bound(self, rng: np.random.Generator) -> None:
        result = length_gap_experiment(Frame(3.0), 0.0, self.sizes["length_bound"], seed=rng)
        self._count("samples_collected", int(result.n_condensed == 0) + int(result.n_diffuse == 0), 2)
        # the gap is a conjecture: recorded, never failed
        self._results.append(
            CheckResult(
                suite=self._suite,
                name="length_gap",
                passed=True,
                measured=result.max_condensed_length,
                tolerance=min(result.secant_bound, result.min_diffuse_length),
                detail=json.dumps(result.as_dict(), sort_keys=True),
            )
        )
