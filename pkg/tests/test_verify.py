import json
import math

import numpy as np
import pytest

from curvspace.config import Settings
from curvspace.verify import QUICK_SIZES, SUITES, CheckResult, Verifier, random_bounds


@pytest.fixture
def verifier():
    return Verifier(Settings(), seed=7, quick=True)


def test_light_suites_pass(verifier):
    results = verifier.run(["geom", "curve", "surfaces"])
    assert results
    assert {r.suite for r in results} == {"geom", "curve", "surfaces"}
    failed = [f"{r.suite}/{r.name}: {r.detail}" for r in results if not r.passed]
    assert failed == []


def test_unknown_suite(verifier):
    with pytest.raises(ValueError, match="unknown suites: plots"):
        verifier.run(["geom", "plots"])


def test_write_produces_report_and_manifest(verifier, tmp_path):
    results = verifier.run(["geom"])
    report = verifier.write(tmp_path / "run", results, ["geom"])
    on_disk = json.loads((tmp_path / "run" / "report.json").read_text(encoding="utf-8"))
    manifest = json.loads((tmp_path / "run" / "run_manifest.json").read_text(encoding="utf-8"))
    assert on_disk["passed"] is report["passed"] is True
    assert len(on_disk["checks"]) == len(results)
    assert manifest["suites"] == ["geom"]
    assert manifest["seed"] == 7
    assert manifest["quick"] is True
    assert manifest["sizes"] == QUICK_SIZES
    assert len(manifest["settings_sha256"]) == 64


def test_same_seed_same_results():
    first = Verifier(Settings(), seed=1, quick=True).run(["geom"])
    second = Verifier(Settings(), seed=1, quick=True).run(["geom"])
    assert [r.measured for r in first] == [r.measured for r in second]


def test_infinite_measurements_are_stringified():
    data = CheckResult("s", "n", True, math.inf, 0.0).as_dict()
    assert data["measured"] == "inf"
    assert data["tolerance"] == 0.0
    json.dumps(data)


@pytest.mark.parametrize("case", ["a", "b", "c", "d", "e"])
def test_random_bounds_match_their_case(case):
    rng = np.random.default_rng(0)
    for _ in range(20):
        b = random_bounds(rng, case)
        assert b.kappa1 < b.kappa2
        signs = {
            "a": b.kappa1 < 0 < b.kappa2,
            "b": 0 < b.kappa1,
            "c": b.kappa1 == 0,
            "d": b.kappa2 < 0,
            "e": b.kappa2 == 0,
        }
        assert signs[case]


def test_random_bounds_reject_unknown_cases():
    with pytest.raises(ValueError):
        random_bounds(np.random.default_rng(0), "f")


def test_every_suite_has_a_runner(verifier):
    for name in SUITES:
        assert callable(getattr(verifier, f"_suite_{name}"))


@pytest.mark.slow
@pytest.mark.parametrize("suite", ["dubins", "excavator"])
def test_full_size_suites_pass(suite):
    results = Verifier(Settings(), seed=0).run([suite])
    failed = [f"{r.name}: {r.measured} > {r.tolerance} {r.detail}" for r in results if not r.passed]
    assert failed == []


def test_quick_dubins_and_excavator_suites_pass(verifier):
    results = verifier.run(["dubins", "excavator"])
    failed = [f"{r.suite}/{r.name}: {r.detail}" for r in results if not r.passed]
    assert failed == []
