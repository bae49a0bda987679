from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import svgwrite

from .components import ComponentReport
from .curve import ArcSegment, HomotopyTrace, PiecewiseCurve, SampledCurve, StepDiagnostics
from .geom import Frame

SVG_PROFILE = "full"


class CurveFormatError(ValueError):
    pass


def dumps(data: Any) -> str:
    return json.dumps(data, ensure_ascii=False, sort_keys=True, indent=2)


def format_bound(value: float) -> Union[float, str]:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def frame_to_json(f: Frame) -> Dict[str, float]:
    return {"x": f.p.real, "y": f.p.imag, "theta": f.theta}


def _number(data: Dict[str, Any], key: str, where: str) -> float:
    if key not in data:
        raise CurveFormatError(f"{where}: missing '{key}'")
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CurveFormatError(f"{where}: '{key}' must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise CurveFormatError(f"{where}: '{key}' must be finite")
    return value


def frame_from_json(data: Any, where: str = "start") -> Frame:
    if not isinstance(data, dict):
        raise CurveFormatError(f"{where} must be an object")
    x = _number(data, "x", where)
    y = _number(data, "y", where)
    theta = _number(data, "theta", where)
    return Frame.from_angle(complex(x, y), theta)


def curve_to_json(c: PiecewiseCurve) -> Dict[str, Any]:
    return {
        "start": frame_to_json(c.start),
        "segments": [{"kappa": seg.kappa, "length": seg.length} for seg in c.segs],
    }


def curve_from_json(data: Any) -> PiecewiseCurve:
    if not isinstance(data, dict):
        raise CurveFormatError("curve must be an object")
    start = frame_from_json(data.get("start"), "start")
    raw = data.get("segments")
    if not isinstance(raw, list) or not raw:
        raise CurveFormatError("segments must be a non-empty list")
    segs: List[ArcSegment] = []
    for index, item in enumerate(raw):
        where = f"segments[{index}]"
        if not isinstance(item, dict):
            raise CurveFormatError(f"{where} must be an object")
        kappa = _number(item, "kappa", where)
        length = _number(item, "length", where)
        if not length > 0:
            raise CurveFormatError(f"{where}: 'length' must be positive")
        segs.append(ArcSegment(kappa, length))
    return PiecewiseCurve(start, tuple(segs))


def parse_curve(text: str) -> PiecewiseCurve:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CurveFormatError(f"curve is not valid JSON: {exc}") from exc
    return curve_from_json(data)


def load_curve(value: str) -> PiecewiseCurve:
    """Curve from inline JSON or, when value names a file, from that file."""
    path = Path(value)
    if not value.lstrip().startswith("{") and path.is_file():
        return parse_curve(path.read_text(encoding="utf-8"))
    return parse_curve(value)


def sampled_to_json(c: SampledCurve) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "points": [[float(p.real), float(p.imag)] for p in c.points],
        "headings": [float(h) for h in c.headings],
        "length": c.length,
    }
    if c.curvature is not None:
        data["curvature"] = [float(k) for k in c.curvature]
    return data


def diagnostics_to_json(d: StepDiagnostics) -> Dict[str, Any]:
    return {
        "s": d.s,
        "theta1": d.theta1,
        "omega": d.omega,
        "length": d.length,
        "max_kappa": d.max_kappa,
        "end": frame_to_json(d.end),
    }


def trace_to_json(trace: HomotopyTrace, include_curves: bool = True) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "s": list(trace.s),
        "diagnostics": [diagnostics_to_json(d) for d in trace.diagnostics],
        "end_drift": trace.end_drift(),
    }
    if include_curves:
        data["curves"] = [
            curve_to_json(c) if isinstance(c, PiecewiseCurve) else sampled_to_json(c)
            for c in trace.curves
        ]
    return data


def report_to_json(report: ComponentReport, include_witnesses: bool = False) -> Dict[str, Any]:
    rec = report.canonical
    data: Dict[str, Any] = {
        "mode": report.mode,
        "count": report.count if report.count is not None else "unknown",
        "labels": list(report.labels),
        "q_hat": frame_to_json(report.q_hat) if report.q_hat is not None else None,
        "theta1": report.theta1,
        "variant": report.variant,
        "remark_based": report.remark_based,
        "canonical": {
            "type": rec.canonical_type.value,
            "case": rec.case,
            "q0": frame_to_json(rec.q0),
            "turning_sign": rec.turning_sign,
        },
    }
    if include_witnesses:
        data["witnesses"] = [curve_to_json(c) for c in report.witnesses]
    return data


def lifts_to_json(reports: Sequence[Tuple[Frame, ComponentReport]]) -> Dict[str, Any]:
    return {
        "lifts": [
            {"frame": frame_to_json(lift), "report": report_to_json(report)}
            for lift, report in reports
        ]
    }


def _bounding_box(polylines: Sequence[np.ndarray], pad: float) -> Tuple[float, float, float, float]:
    stacked = np.concatenate([np.asarray(p, dtype=complex) for p in polylines])
    minx, maxx = float(stacked.real.min()), float(stacked.real.max())
    miny, maxy = float(stacked.imag.min()), float(stacked.imag.max())
    return minx - pad, miny - pad, (maxx - minx) + 2 * pad, (maxy - miny) + 2 * pad


def _path_data(points: np.ndarray) -> str:
    coords = [f"{float(p.real):.6f},{float(p.imag):.6f}" for p in points]
    return "M " + " L ".join(coords)


def svg_drawing(
    polylines: Iterable[np.ndarray],
    path: Optional[Path] = None,
    *,
    stroke: str = "#111",
    stroke_width: float = 0.02,
    pad: float = 0.5,
) -> svgwrite.Drawing:
    """One <path> per polyline, drawn with positive y pointing up."""
    polylines = [np.asarray(p, dtype=complex) for p in polylines if len(p) >= 2]
    if not polylines:
        raise ValueError("nothing to draw")
    x, y, width, height = _bounding_box(polylines, pad)
    dwg = svgwrite.Drawing(str(path) if path is not None else "curves.svg", profile=SVG_PROFILE)
    # the flip maps y to -y, so the box is mirrored as well
    dwg.attribs["viewBox"] = f"{x} {-(y + height)} {width} {height}"
    group = dwg.g(id="curves", transform="scale(1,-1)", fill="none", stroke=stroke, stroke_width=stroke_width)
    for points in polylines:
        group.add(dwg.path(d=_path_data(points), stroke_linecap="round", stroke_linejoin="round"))
    dwg.add(group)
    return dwg


def write_svg(path: Path, polylines: Iterable[np.ndarray], **style: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    svg_drawing(polylines, path, **style).save()
    return path
