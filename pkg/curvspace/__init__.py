from .components import ComponentReport, TurningIncompatible, component_count, same_component
from .config import ConfigError, Settings, load_settings
from .curve import (
    ArcSegment,
    CurveClass,
    FrameMismatch,
    InvalidBounds,
    OutOfBounds,
    PiecewiseCurve,
    end_frame,
    turning_profile,
)
from .dubins import Unreachable, dubins_csc_oracle, dubins_shortest
from .excavator import Excavator, GridTooCoarse, NoAxis, NotCondensed, dubins_condensed
from .geom import ORIGIN, Frame
from .normalize import Bounds, canonicalize

__all__ = [
    "ArcSegment",
    "Bounds",
    "ComponentReport",
    "ConfigError",
    "CurveClass",
    "Excavator",
    "Frame",
    "FrameMismatch",
    "GridTooCoarse",
    "InvalidBounds",
    "NoAxis",
    "NotCondensed",
    "ORIGIN",
    "OutOfBounds",
    "PiecewiseCurve",
    "Settings",
    "TurningIncompatible",
    "Unreachable",
    "__version__",
    "canonicalize",
    "component_count",
    "dubins_condensed",
    "dubins_csc_oracle",
    "dubins_shortest",
    "end_frame",
    "load_settings",
    "same_component",
    "turning_profile",
]

__version__ = "0.1.0"
