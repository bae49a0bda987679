import json
import math
from dataclasses import replace

import numpy as np
import pytest

from curvspace.components import component_count
from curvspace.curve import PiecewiseCurve, sample_points
from curvspace.deform import locally_convex_homotopy
from curvspace.geom import ORIGIN, Frame, frame_distance
from curvspace.normalize import Bounds
from curvspace.serialize import (
    CurveFormatError,
    curve_from_json,
    curve_to_json,
    dumps,
    format_bound,
    frame_from_json,
    frame_to_json,
    load_curve,
    parse_curve,
    report_to_json,
    sampled_to_json,
    svg_drawing,
    trace_to_json,
    write_svg,
)

CURVE = PiecewiseCurve.from_pairs([(1.0, 0.5), (0.0, 2.0), (-0.5, 1.25)], start=Frame.from_angle(1 - 2j, 0.7))


def test_curve_json_round_trip():
    back = curve_from_json(json.loads(dumps(curve_to_json(CURVE))))
    assert back.segs == CURVE.segs
    assert frame_distance(back.start, CURVE.start) < 1e-15


def test_frames_are_written_with_angles():
    assert frame_to_json(Frame(1 + 2j, 1j)) == {"x": 1.0, "y": 2.0, "theta": pytest.approx(math.pi / 2)}
    assert frame_from_json({"x": 0, "y": 0, "theta": 0}) == ORIGIN


@pytest.mark.parametrize(
    "data, message",
    [
        ([], "curve must be an object"),
        ({"start": {"x": 0, "y": 0}, "segments": [{"kappa": 1, "length": 1}]}, "missing 'theta'"),
        ({"start": {"x": 0, "y": 0, "theta": 0}, "segments": []}, "non-empty"),
        ({"start": {"x": 0, "y": 0, "theta": 0}, "segments": [{"kappa": 1, "length": 0}]}, "positive"),
        ({"start": {"x": 0, "y": 0, "theta": 0}, "segments": [{"kappa": "1", "length": 1}]}, "must be a number"),
        ({"start": {"x": 0, "y": 0, "theta": 0}, "segments": [{"kappa": True, "length": 1}]}, "must be a number"),
    ],
)
def test_malformed_curves_are_rejected(data, message):
    with pytest.raises(CurveFormatError, match=message):
        curve_from_json(data)


def test_parse_rejects_invalid_json():
    with pytest.raises(CurveFormatError):
        parse_curve("{not json")


def test_load_curve_from_file(tmp_path):
    path = tmp_path / "curve.json"
    path.write_text(dumps(curve_to_json(CURVE)), encoding="utf-8")
    assert load_curve(str(path)).segs == CURVE.segs
    assert load_curve(dumps(curve_to_json(CURVE))).segs == CURVE.segs


def test_bounds_render_infinity_as_text():
    assert format_bound(math.inf) == "inf"
    assert format_bound(-math.inf) == "-inf"
    assert format_bound(1.5) == 1.5


def test_sampled_curves_carry_points_and_headings():
    data = sampled_to_json(sample_points(CURVE, 0.25))
    assert len(data["points"]) == len(data["headings"])
    assert data["length"] == pytest.approx(CURVE.length)
    assert "curvature" not in data


def test_trace_json_can_omit_curves():
    quarter = PiecewiseCurve.from_pairs([(1.0, math.pi / 2)])
    trace = locally_convex_homotopy(quarter, quarter, n_steps=2)
    data = trace_to_json(trace, include_curves=False)
    assert data["s"] == [0.0, 0.5, 1.0]
    assert "curves" not in data
    assert len(trace_to_json(trace)["curves"]) == 3


def test_reports_are_json_ready():
    report = component_count(ORIGIN, Frame(3.0), Bounds(-1.0, 1.0), 0.0)
    data = json.loads(dumps(report_to_json(report)))
    assert data["count"] == 2
    assert data["canonical"]["type"] == "(-1,1)"
    assert data["mode"] == "fixed_turning"


def test_unknown_counts_are_spelled_out():
    report = component_count(ORIGIN, Frame(3.0), Bounds(0.0, math.inf), -2 * math.pi)
    assert report_to_json(report)["count"] == 0
    assert report_to_json(replace(report, count=None))["count"] == "unknown"


def test_svg_has_one_path_per_polyline(tmp_path):
    lines = [np.array([0, 1, 1 + 1j]), np.array([2, 3j])]
    drawing = svg_drawing(lines)
    assert drawing.tostring().count("<path") == 2
    path = write_svg(tmp_path / "out" / "curves.svg", lines)
    text = path.read_text(encoding="utf-8")
    assert "scale(1,-1)" in text
    with pytest.raises(ValueError):
        svg_drawing([np.array([0j])])
