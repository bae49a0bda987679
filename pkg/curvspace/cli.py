from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .components import component_count, same_component
from .config import ConfigError, Settings, load_settings, resolve_seed
from .curve import (
    PiecewiseCurve,
    SampledCurve,
    breakpoint_frames,
    end_frame,
    random_critical_curve,
    random_curve,
    sample_points,
    turning_profile,
)
from .deform import (
    DEFAULT_DS,
    DEFAULT_EPS,
    DEFAULT_T0,
    attach_eight,
    eight_same_component,
    find_antipodal_pairs,
    graft,
    locally_convex_homotopy,
    spread_eights,
    spread_loops,
)
from .dubins import dubins_csc_oracle, dubins_shortest, word_of
from .excavator import Excavator, dubins_condensed
from .geom import Frame
from .normalize import Bounds
from .regions import (
    SignString,
    amplitude_circle_test,
    any_critical_contains,
    condensed_contains,
    condensed_region,
    critical_contains,
    critical_region,
    disconnection_test,
    emit_region_boundary,
)
from .serialize import (
    curve_to_json,
    dumps,
    format_bound,
    frame_to_json,
    lifts_to_json,
    load_curve,
    report_to_json,
    sampled_to_json,
    trace_to_json,
    write_svg,
)
from .surfaces import SURFACE_KINDS, SurfaceModel, surface_components
from .verify import SUITES, Verifier

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
EXIT_FAILED_CHECKS = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

EPILOG = """\
Values starting with a minus sign must be glued to their option:
  curvspace components --q 3 --theta 0 --k1=-inf --k2 inf
  curvspace region --q 4 --theta 0 --which critical --sigma=-+
"""


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def extended_float(text: str) -> float:
    """A float that may also be inf or -inf, but never nan."""
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if math.isnan(value):
        raise argparse.ArgumentTypeError("nan is not allowed")
    return value


def finite_float(text: str) -> float:
    value = extended_float(text)
    if math.isinf(value):
        raise argparse.ArgumentTypeError(f"{text!r} must be finite")
    return value


def point(text: str) -> complex:
    """A plane point written as 'x', 'x,y' or 'x+yi'."""
    try:
        if "," in text:
            x, y = text.split(",", 1)
            value = complex(float(x), float(y))
        else:
            value = complex(text.strip().replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a point: {text!r}") from exc
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise argparse.ArgumentTypeError(f"{text!r} must be finite")
    return value


def insertion(text: str) -> Tuple[float, float]:
    try:
        s, sigma = text.split(":", 1)
        return finite_float(s), finite_float(sigma)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"insertion must look like s:length, got {text!r}") from exc


def _emit(data: Dict[str, Any]) -> int:
    print(dumps(data))
    return 0


def _fail(exc: BaseException, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload, ensure_ascii=False, sort_keys=True), file=sys.stderr)
    return code


def _settings(args: argparse.Namespace) -> Settings:
    return load_settings(Path(args.config) if args.config else None)


def _start(args: argparse.Namespace) -> Frame:
    return Frame.from_angle(args.p, args.phi)


def _target(args: argparse.Namespace) -> Frame:
    return Frame.from_angle(args.q, args.theta)


def _turning(args: argparse.Namespace) -> float:
    return args.turning if args.turning is not None else args.theta - args.phi


def _bounds(args: argparse.Namespace) -> Bounds:
    return Bounds(args.k1, args.k2)


def _polylines(curves: Sequence[Any], ds: float) -> List[np.ndarray]:
    lines = []
    for c in curves:
        sampled = c if isinstance(c, SampledCurve) else sample_points(c, ds)
        lines.append(np.asarray(sampled.points))
    return lines


def classify_command(args: argparse.Namespace) -> int:
    settings = _settings(args)
    c = load_curve(args.curve)
    profile = turning_profile(c, settings.tolerances.classification)
    return _emit(
        {
            "class": profile.curve_class.value,
            "theta1": profile.theta1,
            "omega": profile.omega,
            "theta_plus": profile.theta_plus,
            "theta_minus": profile.theta_minus,
            "length": c.length,
        }
    )


def endframe_command(args: argparse.Namespace) -> int:
    c = load_curve(args.curve)
    data: Dict[str, Any] = {"end": frame_to_json(end_frame(c)), "length": c.length}
    if args.breakpoints:
        data["breakpoints"] = [frame_to_json(f) for f in breakpoint_frames(c)]
    return _emit(data)


def components_command(args: argparse.Namespace) -> int:
    settings = _settings(args)
    b = _bounds(args)
    if args.curve or args.other:
        if not (args.curve and args.other):
            raise UsageError("--curve and --other must be given together")
        same = same_component(load_curve(args.curve), load_curve(args.other), b, args.variant)
        return _emit({"same_component": same, "variant": args.variant})
    if args.q is None or args.theta is None:
        raise UsageError("components needs --q and --theta, or --curve and --other")
    report = component_count(_start(args), _target(args), b, _turning(args), args.variant)
    data = report_to_json(report, include_witnesses=args.witnesses)
    data["bounds"] = [format_bound(b.kappa1), format_bound(b.kappa2)]
    logger.debug("component query with tolerances %s", settings.tolerances)
    return _emit(data)


def _default_sigma(theta1: float) -> SignString:
    minus_plus = SignString((-1, 1))
    return minus_plus if theta1 >= 0 else -minus_plus


def region_command(args: argparse.Namespace) -> int:
    settings = _settings(args)
    tol = settings.tolerances.boundary
    theta1 = args.theta
    kw = {"kappa0": args.kappa0, "tol": tol}
    data: Dict[str, Any] = {"which": args.which, "variant": args.variant, "theta1": theta1}
    if args.which == "condensed":
        verdict = condensed_contains(args.q, theta1, args.variant, **kw)
        shown = [condensed_region(theta1)]
    elif args.which == "critical":
        if args.sigma:
            sigma = SignString.parse(args.sigma)
            verdict = critical_contains(args.q, theta1, sigma, args.variant, **kw)
        else:
            sigma = _default_sigma(theta1)
            verdict = any_critical_contains(args.q, theta1, args.variant, **kw)
        shown = [critical_region(theta1, sigma)]
        data["sigma"] = str(sigma)
    elif args.which == "disconnection":
        verdict = None
        data["value"] = disconnection_test(args.q, theta1, args.variant, **kw)
        shown = [condensed_region(theta1), critical_region(theta1, _default_sigma(theta1))] if args.svg else []
    else:
        if args.omega is None:
            raise UsageError("--which amplitude needs --omega")
        verdict = None
        data["value"] = amplitude_circle_test(args.kappa0 * args.q, theta1, args.omega)
        shown = []
    if verdict is not None:
        data["status"] = verdict.status.value
        data["value"] = verdict.as_bool(args.variant)
    if args.svg:
        polylines = [line / args.kappa0 for region in shown for line in emit_region_boundary(region, args.ds)]
        data["svg"] = str(write_svg(Path(args.svg), polylines))
    return _emit(data)


def dubins_command(args: argparse.Namespace) -> int:
    start, target = _start(args), _target(args)
    if args.mode == "condensed":
        c = dubins_condensed(target, args.kappa0, start=start)
    elif args.mode == "csc":
        c = dubins_csc_oracle(target, args.kappa0, start=start)
    else:
        c = dubins_shortest(target, args.kappa0, start=start)
    profile = turning_profile(c)
    return _emit(
        {
            "mode": args.mode,
            "word": word_of(c),
            "length": c.length,
            "class": profile.curve_class.value,
            "curve": curve_to_json(c),
        }
    )


def deform_command(args: argparse.Namespace) -> int:
    settings = _settings(args)
    c = load_curve(args.curve)
    drawn: List[Any] = []
    if args.op == "excavate":
        cfg = settings.excavator
        excavator = Excavator(c, args.kappa0, args.grid or cfg.grid_points, cfg.area_tol_factor)
        trace = excavator.trace(args.steps or cfg.n_steps)
        data = {"op": args.op, "trace": trace_to_json(trace, include_curves=args.include_curves)}
        drawn = list(trace.curves)
    elif args.op == "convex":
        if not args.other:
            raise UsageError("--op convex needs --other")
        trace = locally_convex_homotopy(c, load_curve(args.other), args.steps or 16)
        data = {"op": args.op, "trace": trace_to_json(trace, include_curves=args.include_curves)}
        drawn = list(trace.curves)
    elif args.op == "attach":
        result = attach_eight(c, args.n, args.t0, args.eps, args.kind)
        data = {"op": args.op, "curve": curve_to_json(result)}
        drawn = [result]
    elif args.op == "spread":
        sampled = spread_eights(c, args.n, args.ds) if args.kind == "eight" else spread_loops(c, args.n, args.ds)
        data = {"op": args.op, "sampled": sampled_to_json(sampled)}
        drawn = [sampled]
    elif args.op == "graft":
        pairing = [int(x) for x in args.pairing.split(",")] if args.pairing else []
        result = graft(c, args.insert or [], pairing)
        data = {"op": args.op, "curve": curve_to_json(result)}
        drawn = [result]
    elif args.op == "antipodal":
        data = {"op": args.op, "pairs": [list(pair) for pair in find_antipodal_pairs(c)]}
    else:
        same = eight_same_component(c, _bounds(args), args.variant)
        data = {"op": args.op, "same_component": same}
    if args.svg and drawn:
        data["svg"] = str(write_svg(Path(args.svg), _polylines(drawn, args.ds)))
    return _emit(data)


def surface_command(args: argparse.Namespace) -> int:
    settings = _settings(args)
    surface = SurfaceModel.build(args.kind, tuple(args.period or ()))
    radius = args.max_radius if args.max_radius is not None else settings.surfaces.max_radius
    reports = surface_components(
        surface,
        _start(args),
        _target(args),
        _bounds(args),
        theta1=args.turning,
        max_radius=radius,
        variant=args.variant,
    )
    data = lifts_to_json(reports)
    data["kind"] = surface.kind
    return _emit(data)


def random_command(args: argparse.Namespace) -> int:
    settings = _settings(args)
    seed = resolve_seed(args.seed, settings)
    sampling = settings.sampling
    if args.critical:
        c = random_critical_curve(seed)
    else:
        c = random_curve(
            args.k1,
            args.k2,
            args.n_segs or sampling.n_segs,
            args.max_seg_len or sampling.max_seg_len,
            seed,
            start=_start(args),
            curvature_cap=sampling.curvature_cap,
            margin=sampling.margin,
        )
    return _emit({"seed": seed, "curve": curve_to_json(c)})


def verify_command(args: argparse.Namespace) -> int:
    settings = _settings(args)
    seed = resolve_seed(args.seed, settings)
    suites = args.suites or list(SUITES)
    verifier = Verifier(settings, seed, quick=args.quick)
    results = verifier.run(suites)
    if args.out:
        verifier.write(Path(args.out), results, suites)
    failed = [f"{r.suite}/{r.name}" for r in results if not r.passed]
    _emit(
        {
            "seed": seed,
            "suites": suites,
            "checks": len(results),
            "failed": failed,
            "passed": not failed,
        }
    )
    return EXIT_FAILED_CHECKS if failed else 0


def _common() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="YAML settings file")
    common.add_argument("--seed", type=int, help="Random seed (default: $CURVSPACE_SEED or settings)")
    common.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING", help="Log level on stderr")
    return common


def _frame_args(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--q", type=point, required=required, help="End position: x, x,y or x+yi")
    parser.add_argument("--theta", type=finite_float, required=required, help="End heading in radians")
    parser.add_argument("--p", type=point, default=0j, help="Start position (default origin)")
    parser.add_argument("--phi", type=finite_float, default=0.0, help="Start heading in radians")


def _bound_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--k1", type=extended_float, default=-1.0, help="Lower curvature bound, may be -inf (write --k1=-inf)"
    )
    parser.add_argument("--k2", type=extended_float, default=1.0, help="Upper curvature bound, may be inf")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(
        prog="curvspace",
        description="Spaces of planar curves with bounded curvature",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    classify = subparsers.add_parser("classify", parents=[common], help="Turning, amplitude and class of a curve")
    classify.add_argument("--curve", required=True, help="Curve JSON, inline or a file path")
    classify.set_defaults(func=classify_command)

    endframe = subparsers.add_parser("endframe", parents=[common], help="End frame of a curve")
    endframe.add_argument("--curve", required=True, help="Curve JSON, inline or a file path")
    endframe.add_argument("--breakpoints", action="store_true", help="Also list the frames between segments")
    endframe.set_defaults(func=endframe_command)

    components = subparsers.add_parser("components", parents=[common], help="Count components of a curve space")
    _frame_args(components, required=False)
    _bound_args(components)
    components.add_argument("--turning", type=finite_float, help="Total turning (default theta - phi)")
    components.add_argument("--variant", choices=("open", "closed"), default="open")
    components.add_argument("--witnesses", action="store_true", help="Include witness curves")
    components.add_argument("--curve", help="First curve for a same-component query")
    components.add_argument("--other", help="Second curve for a same-component query")
    components.set_defaults(func=components_command)

    region = subparsers.add_parser("region", parents=[common], help="Region membership of an end point")
    region.add_argument("--q", type=point, required=True)
    region.add_argument("--theta", type=finite_float, required=True, help="Total turning")
    region.add_argument(
        "--which", choices=("condensed", "critical", "disconnection", "amplitude"), default="condensed"
    )
    region.add_argument("--variant", choices=("open", "closed"), default="open")
    region.add_argument("--sigma", help="Sign string such as -+ or +-+")
    region.add_argument("--omega", type=finite_float, help="Amplitude for --which amplitude")
    region.add_argument("--kappa0", type=finite_float, default=1.0, help="Curvature bound")
    region.add_argument("--svg", help="Write the region boundary to this SVG file")
    region.add_argument("--ds", type=finite_float, default=DEFAULT_DS, help="Polyline spacing for SVG output")
    region.set_defaults(func=region_command)

    dubins = subparsers.add_parser("dubins", parents=[common], help="Shortest paths between two frames")
    _frame_args(dubins)
    dubins.add_argument("--kappa0", type=finite_float, default=1.0)
    dubins.add_argument("--mode", choices=("condensed", "csc", "shortest"), default="condensed")
    dubins.set_defaults(func=dubins_command)

    deform = subparsers.add_parser("deform", parents=[common], help="Homotopies and surgeries on a curve")
    deform.add_argument("--curve", required=True, help="Curve JSON, inline or a file path")
    deform.add_argument(
        "--op",
        choices=("excavate", "convex", "attach", "spread", "graft", "antipodal", "eight-test"),
        required=True,
    )
    deform.add_argument("--other", help="Target curve for --op convex")
    deform.add_argument("--kappa0", type=finite_float, default=1.0)
    deform.add_argument("--n", type=int, default=1, help="Number of loops or eights")
    deform.add_argument("--kind", choices=("eight", "loop"), default="eight")
    deform.add_argument("--t0", type=finite_float, default=DEFAULT_T0)
    deform.add_argument("--eps", type=finite_float, default=DEFAULT_EPS)
    deform.add_argument("--steps", type=int, help="Homotopy steps")
    deform.add_argument("--grid", type=int, help="Excavator grid points")
    deform.add_argument("--ds", type=finite_float, default=DEFAULT_DS)
    deform.add_argument("--insert", type=insertion, action="append", help="Graft insertion s:length")
    deform.add_argument("--pairing", help="Comma separated pairing permutation for graft")
    deform.add_argument("--include-curves", action="store_true", help="Include trace curves in the output")
    deform.add_argument("--variant", choices=("open", "closed"), default="open")
    deform.add_argument("--svg", help="Write the resulting curves to this SVG file")
    _bound_args(deform)
    deform.set_defaults(func=deform_command)

    surface = subparsers.add_parser("surface", parents=[common], help="Components on a flat surface")
    surface.add_argument("--kind", choices=SURFACE_KINDS, required=True)
    surface.add_argument("--period", type=point, action="append", help="Deck period, repeatable")
    _frame_args(surface)
    _bound_args(surface)
    surface.add_argument("--turning", type=finite_float, help="Total turning for the matching lift")
    surface.add_argument("--max-radius", type=finite_float)
    surface.add_argument("--variant", choices=("open", "closed"), default="open")
    surface.set_defaults(func=surface_command)

    random = subparsers.add_parser("random", parents=[common], help="Random curve within bounds")
    _bound_args(random)
    random.add_argument("--n-segs", type=int)
    random.add_argument("--max-seg-len", type=finite_float)
    random.add_argument("--p", type=point, default=0j)
    random.add_argument("--phi", type=finite_float, default=0.0)
    random.add_argument("--critical", action="store_true", help="Amplitude exactly pi, bounds (-1, 1)")
    random.set_defaults(func=random_command)

    verify = subparsers.add_parser("verify", parents=[common], help="Run the cross-check suites")
    verify.add_argument("suites", nargs="*", metavar="SUITE", help=f"Any of {', '.join(SUITES)}")
    verify.add_argument("--out", help="Write report.json and run_manifest.json here")
    verify.add_argument("--quick", action="store_true", help="Small sample sizes")
    verify.set_defaults(func=verify_command)

    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail(exc, EXIT_USAGE)
    _configure_logging(args.log_level)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        return _fail(exc, EXIT_USAGE)
    except (RuntimeError, ArithmeticError) as exc:
        logger.debug("numeric failure", exc_info=True)
        return _fail(exc, EXIT_NUMERIC)


if __name__ == "__main__":
    sys.exit(main())
