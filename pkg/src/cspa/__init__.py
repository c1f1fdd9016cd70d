"""Channel static partner antenna (CSPA) toolkit.

Simulates wireless links whose remote antenna co-moves with the mobile one to
keep the channel coefficient static, analyzes the resulting traces, and fits
the corresponding statistical channel models.
"""

__version__ = "0.1.0"

from .core import (
    C0,
    DEFAULT_SEED,
    Antenna,
    Carrier,
    ChannelSample,
    MotionAssignment,
    MotionMode,
    NoiseConfig,
    PlaneReflector,
    PointScatterer,
    Scenario,
    Trace,
    Trajectory,
    Vec3,
    clutter_scenario,
    default_scenario,
    validate_scenario,
    wavelength_of,
    zero_noise,
)
from .motion import Strategy

__all__ = [
    "__version__",
    "C0",
    "DEFAULT_SEED",
    "Antenna",
    "Carrier",
    "ChannelSample",
    "MotionAssignment",
    "MotionMode",
    "NoiseConfig",
    "PlaneReflector",
    "PointScatterer",
    "Scenario",
    "Strategy",
    "Trace",
    "Trajectory",
    "Vec3",
    "clutter_scenario",
    "default_scenario",
    "validate_scenario",
    "wavelength_of",
    "zero_noise",
]
