from pathlib import Path

import pytest

from curvspace.config import SEED_ENV, ConfigError, Settings, load_settings, parse_settings, resolve_seed

DEMO = Path(__file__).resolve().parents[1] / "Docs" / "demo" / "config" / "settings.yml"


def test_no_file_means_defaults():
    settings = load_settings(None)
    assert settings == Settings()
    assert settings.excavator.grid_points == 4096
    assert settings.surfaces.max_radius is None


def test_demo_settings_match_defaults():
    assert load_settings(DEMO) == Settings()


def test_partial_file_overrides_only_its_keys(settings_file):
    path = settings_file(
        "version: 1\n"
        "excavator:\n"
        "  grid_points: 512\n"
        "surfaces:\n"
        "  max_radius: 12\n"
    )
    settings = load_settings(path)
    assert settings.excavator.grid_points == 512
    assert settings.excavator.n_steps == 64
    assert settings.surfaces.max_radius == 12.0
    assert settings.tolerances == Settings().tolerances


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="Missing config file"):
        load_settings(tmp_path / "absent.yml")


@pytest.mark.parametrize(
    "text, message",
    [
        ("version: 2\n", "unsupported version 2"),
        ("- 1\n- 2\n", "Invalid YAML structure"),
        ("version: 1\nplots: {}\n", "unknown sections plots"),
        ("version: 1\nexcavator: [1]\n", "excavator must be a mapping"),
        ("version: [1\n", "invalid YAML"),
    ],
)
def test_malformed_files(settings_file, text, message):
    with pytest.raises(ConfigError, match=message):
        load_settings(settings_file(text))


@pytest.mark.parametrize(
    "data, message",
    [
        ({"excavator": {"grid_points": 1.5}}, "excavator.grid_points must be an integer"),
        ({"excavator": {"grid_points": 2}}, "excavator.grid_points must be at least 3"),
        ({"tolerances": {"frame": "tight"}}, "tolerances.frame must be a number"),
        ({"tolerances": {"boundary": 0}}, "tolerances.boundary must be positive"),
        ({"sampling": {"seed": True}}, "sampling.seed must be an integer"),
        ({"surfaces": {"max_radius": -1}}, "surfaces.max_radius must be positive"),
    ],
)
def test_values_are_checked(data, message):
    with pytest.raises(ConfigError, match=message):
        parse_settings(data)


def test_seed_resolution_order():
    settings = parse_settings({"sampling": {"seed": 5}})
    assert resolve_seed(9, settings, {SEED_ENV: "7"}) == 9
    assert resolve_seed(None, settings, {SEED_ENV: "7"}) == 7
    assert resolve_seed(None, settings, {}) == 5
    assert resolve_seed(None, settings, {SEED_ENV: ""}) == 5


def test_seed_from_environment_must_be_an_integer():
    with pytest.raises(ConfigError, match=SEED_ENV):
        resolve_seed(None, Settings(), {SEED_ENV: "abc"})
