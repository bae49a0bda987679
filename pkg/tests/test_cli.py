import json
import math

import pytest

from curvspace.cli import EXIT_NUMERIC, EXIT_USAGE, build_parser, main, point
from curvspace.excavator import NoAxis
from curvspace.serialize import dumps

QUARTER = dumps({"start": {"x": 0, "y": 0, "theta": 0}, "segments": [{"kappa": 1, "length": math.pi / 2}]})


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_parser_has_all_commands():
    parser = build_parser()
    for command in ("classify", "endframe", "components", "region", "dubins", "deform", "surface", "random", "verify"):
        assert parser.parse_args(_minimal(command)).command == command


def _minimal(command):
    return {
        "classify": ["classify", "--curve", QUARTER],
        "endframe": ["endframe", "--curve", QUARTER],
        "components": ["components"],
        "region": ["region", "--q", "1", "--theta", "0"],
        "dubins": ["dubins", "--q", "1", "--theta", "0"],
        "deform": ["deform", "--curve", QUARTER, "--op", "antipodal"],
        "surface": ["surface", "--kind", "plane", "--q", "1", "--theta", "0"],
        "random": ["random"],
        "verify": ["verify"],
    }[command]


@pytest.mark.parametrize("text, value", [("3", 3), ("1,2", 1 + 2j), ("1+2i", 1 + 2j)])
def test_points_accept_three_spellings(text, value):
    assert point(text) == value


def test_endframe_of_a_quarter_arc(capsys):
    data = run_json(capsys, "endframe", "--curve", QUARTER, "--breakpoints")
    assert data["end"]["x"] == pytest.approx(1.0)
    assert data["end"]["y"] == pytest.approx(1.0)
    assert data["end"]["theta"] == pytest.approx(math.pi / 2)
    assert len(data["breakpoints"]) == 2


def test_classify(capsys):
    data = run_json(capsys, "classify", "--curve", QUARTER)
    assert data["class"] == "condensed"
    assert data["theta1"] == pytest.approx(math.pi / 2)


def test_components_below_the_threshold(capsys):
    data = run_json(capsys, "components", "--q", "3", "--theta", "0")
    assert data["count"] == 2
    assert data["bounds"] == [-1.0, 1.0]


def test_components_with_infinite_bound(capsys):
    data = run_json(capsys, "components", "--q", "3", "--theta", "0", "--k1=-inf", "--k2", "inf")
    assert data["count"] == 1
    assert data["bounds"] == ["-inf", "inf"]


def test_region_boundary_point(capsys):
    data = run_json(capsys, "region", "--q", "4", "--theta", "0", "--which", "critical", "--sigma=-+")
    assert data["status"] == "boundary"
    assert data["value"] is False
    closed = run_json(capsys, "region", "--q", "4", "--theta", "0", "--which", "critical", "--sigma=-+", "--variant", "closed")
    assert closed["value"] is True


def test_region_svg(capsys, tmp_path):
    target = tmp_path / "plots" / "condensed.svg"
    data = run_json(capsys, "region", "--q", "1", "--theta", "0", "--svg", str(target))
    assert data["status"] == "inside"
    assert target.exists()
    assert "<path" in target.read_text(encoding="utf-8")


def test_dubins_straight_line(capsys):
    data = run_json(capsys, "dubins", "--q", "3", "--theta", "0", "--mode", "shortest")
    assert data["word"] == "S"
    assert data["length"] == pytest.approx(3.0)


def test_random_is_reproducible(capsys):
    first = run_json(capsys, "random", "--seed", "5", "--k1=-2", "--k2", "2")
    second = run_json(capsys, "random", "--seed", "5", "--k1=-2", "--k2", "2")
    assert first == second
    assert first["seed"] == 5


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("CURVSPACE_SEED", "11")
    assert run_json(capsys, "random")["seed"] == 11


def test_usage_errors_exit_two(capsys):
    code, _, err = run(capsys, "components")
    assert code == EXIT_USAGE
    assert json.loads(err)["error"] == "UsageError"
    code, _, _ = run(capsys, "fly")
    assert code == EXIT_USAGE


def test_incompatible_turning_exits_two(capsys):
    code, _, err = run(capsys, "components", "--q", "3", "--theta", "0", "--turning", "1")
    assert code == EXIT_USAGE
    assert json.loads(err)["error"] == "TurningIncompatible"


def test_bad_config_exits_two(capsys, settings_file):
    path = settings_file("version: 3\n")
    code, _, err = run(capsys, "random", "--config", str(path))
    assert code == EXIT_USAGE
    assert json.loads(err)["error"] == "ConfigError"


def test_deform_attach(capsys, tmp_path):
    segment = dumps({"start": {"x": 0, "y": 0, "theta": 0}, "segments": [{"kappa": 0, "length": 5}]})
    svg = tmp_path / "eight.svg"
    data = run_json(capsys, "deform", "--curve", segment, "--op", "attach", "--svg", str(svg))
    assert len(data["curve"]["segments"]) > 1
    assert svg.exists()


def test_verify_writes_report(capsys, tmp_path):
    out = tmp_path / "verify"
    data = run_json(capsys, "verify", "geom", "curve", "--quick", "--seed", "2", "--out", str(out))
    assert data["passed"] is True
    assert data["suites"] == ["geom", "curve"]
    assert (out / "report.json").exists()
    manifest = json.loads((out / "run_manifest.json").read_text(encoding="utf-8"))
    assert manifest["seed"] == 2


def test_condensed_dubins_to_a_far_target(capsys):
    data = run_json(capsys, "dubins", "--q", "5", "--theta", "0")
    assert data["mode"] == "condensed"
    assert data["length"] == pytest.approx(5.0)


def test_numeric_failures_exit_three(capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise ZeroDivisionError("float division by zero")

    monkeypatch.setattr("curvspace.cli.dubins_condensed", broken)
    code, out, err = run(capsys, "dubins", "--q", "5", "--theta", "0")
    assert code == EXIT_NUMERIC
    assert out == ""
    assert json.loads(err)["error"] == "ZeroDivisionError"


def test_solver_failures_exit_three(capsys, monkeypatch):
    def no_axis(*args, **kwargs):
        raise NoAxis("no condensed minimizer found")

    monkeypatch.setattr("curvspace.cli.dubins_condensed", no_axis)
    code, _, err = run(capsys, "dubins", "--q", "5", "--theta", "0")
    assert code == EXIT_NUMERIC
    assert json.loads(err)["error"] == "NoAxis"


def test_help_shows_how_to_pass_negative_infinity():
    assert "--k1=-inf" in build_parser().format_help()
