from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml

SEED_ENV = "CURVSPACE_SEED"


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class Tolerances:
    frame: float = 1e-9
    classification: float = 1e-9
    boundary: float = 1e-9
    heading: float = 1e-9


@dataclass(frozen=True)
class ExcavatorSettings:
    grid_points: int = 4096
    n_steps: int = 64
    area_tol_factor: float = 1e-10


@dataclass(frozen=True)
class SamplingSettings:
    curvature_cap: float = 8.0
    margin: float = 1e-6
    max_seg_len: float = 2.0
    n_segs: int = 4
    seed: int = 0


@dataclass(frozen=True)
class SurfaceSettings:
    max_radius: Optional[float] = None


@dataclass(frozen=True)
class Settings:
    tolerances: Tolerances = field(default_factory=Tolerances)
    excavator: ExcavatorSettings = field(default_factory=ExcavatorSettings)
    sampling: SamplingSettings = field(default_factory=SamplingSettings)
    surfaces: SurfaceSettings = field(default_factory=SurfaceSettings)


SECTIONS = ("tolerances", "excavator", "sampling", "surfaces")


def _read_yaml(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise ConfigError(f"Missing config file: {path}")
    with path.open("r", encoding="utf-8") as handle:
        try:
            data = yaml.safe_load(handle)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path.name}: invalid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"Invalid YAML structure in {path.name}")
    version = data.get("version")
    if version != 1:
        raise ConfigError(f"{path.name}: unsupported version {version}")
    unknown = sorted(set(data) - set(SECTIONS) - {"version"})
    if unknown:
        raise ConfigError(f"{path.name}: unknown sections {', '.join(unknown)}")
    return data


def _section(data: Mapping[str, Any], name: str, source: str) -> Dict[str, Any]:
    section = data.get(name, {})
    if section is None:
        return {}
    if not isinstance(section, dict):
        raise ConfigError(f"{source}: {name} must be a mapping")
    return section


def _float(section: Mapping[str, Any], key: str, default: float, where: str) -> float:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number")
    return float(value)


def _positive(section: Mapping[str, Any], key: str, default: float, where: str) -> float:
    value = _float(section, key, default, where)
    if not value > 0:
        raise ConfigError(f"{where}.{key} must be positive")
    return value


def _int(section: Mapping[str, Any], key: str, default: int, where: str, minimum: int = 0) -> int:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{key} must be an integer")
    if value < minimum:
        raise ConfigError(f"{where}.{key} must be at least {minimum}")
    return value


def _parse_tolerances(data: Mapping[str, Any], source: str) -> Tolerances:
    section = _section(data, "tolerances", source)
    where = f"{source}: tolerances"
    defaults = Tolerances()
    return Tolerances(
        frame=_positive(section, "frame", defaults.frame, where),
        classification=_positive(section, "classification", defaults.classification, where),
        boundary=_positive(section, "boundary", defaults.boundary, where),
        heading=_positive(section, "heading", defaults.heading, where),
    )


def _parse_excavator(data: Mapping[str, Any], source: str) -> ExcavatorSettings:
    section = _section(data, "excavator", source)
    where = f"{source}: excavator"
    defaults = ExcavatorSettings()
    return ExcavatorSettings(
        grid_points=_int(section, "grid_points", defaults.grid_points, where, minimum=3),
        n_steps=_int(section, "n_steps", defaults.n_steps, where, minimum=1),
        area_tol_factor=_positive(section, "area_tol_factor", defaults.area_tol_factor, where),
    )


def _parse_sampling(data: Mapping[str, Any], source: str) -> SamplingSettings:
    section = _section(data, "sampling", source)
    where = f"{source}: sampling"
    defaults = SamplingSettings()
    return SamplingSettings(
        curvature_cap=_positive(section, "curvature_cap", defaults.curvature_cap, where),
        margin=_positive(section, "margin", defaults.margin, where),
        max_seg_len=_positive(section, "max_seg_len", defaults.max_seg_len, where),
        n_segs=_int(section, "n_segs", defaults.n_segs, where, minimum=1),
        seed=_int(section, "seed", defaults.seed, where),
    )


def _parse_surfaces(data: Mapping[str, Any], source: str) -> SurfaceSettings:
    section = _section(data, "surfaces", source)
    value = section.get("max_radius")
    if value is None:
        return SurfaceSettings()
    return SurfaceSettings(max_radius=_positive(section, "max_radius", 0.0, f"{source}: surfaces"))


def parse_settings(data: Mapping[str, Any], source: str = "settings.yml") -> Settings:
    return Settings(
        tolerances=_parse_tolerances(data, source),
        excavator=_parse_excavator(data, source),
        sampling=_parse_sampling(data, source),
        surfaces=_parse_surfaces(data, source),
    )


def load_settings(path: Optional[Path] = None) -> Settings:
    if path is None:
        return Settings()
    path = Path(path)
    return parse_settings(_read_yaml(path), path.name)


def resolve_seed(explicit: Optional[int], settings: Settings, env: Mapping[str, str] = os.environ) -> int:
    if explicit is not None:
        return explicit
    raw = env.get(SEED_ENV)
    if raw is None or raw == "":
        return settings.sampling.seed
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from exc
