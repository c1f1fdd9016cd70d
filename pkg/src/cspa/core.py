"""Shared geometry, scenario and trace types plus unit conventions.

Unit conventions, used everywhere in this package: lengths in meters, time in
seconds, frequency in Hz, antenna gain in dBi, phase in radians.
Wavelength-normalized distances appear only in presentation output (CSV column
``moved_distance_lambda``).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Union

C0 = 299_792_458.0  # vacuum speed of light, m/s

# Default seed used by every seeded entry point when the caller gives none.
# 2450 after the 2450 MHz ISM carrier of the reference rig.
DEFAULT_SEED = 2450

# Calibrated defaults for the built-in free-space scenario: initial separation
# gives a line-of-sight magnitude of about -43.0 dB and the total travel gives
# an uncompensated peak-to-peak magnitude of about 7.22 dB.
DEFAULT_FREQUENCY_HZ = 2.45e9
DEFAULT_SEPARATION_M = 1.375
DEFAULT_TRAVEL_M = 1.782
DEFAULT_STEP_LAMBDA = 0.05
DEFAULT_DWELL_S = 0.2
DEFAULT_SPEED_MPS = 0.1
DEFAULT_POSITIONING_ACCURACY_M = 2.0e-5


def wavelength_of(frequency: float, medium_index: float = 1.0) -> float:
    """Wavelength in meters for a carrier in a homogeneous medium.

    Raises ValueError for non-positive frequency or a medium index below 1.
    """
    if frequency <= 0:
        raise ValueError(f"frequency must be positive, got {frequency}")
    if medium_index < 1:
        raise ValueError(f"medium_index must be >= 1, got {medium_index}")
    return C0 / (medium_index * frequency)


@dataclass(frozen=True)
class Vec3:
    """Cartesian point or direction, components in meters."""

    x: float
    y: float
    z: float

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def is_finite(self) -> bool:
        return all(math.isfinite(c) for c in (self.x, self.y, self.z))


def distance(a: Vec3, b: Vec3) -> float:
    return (a - b).norm()


def point_segment_distance(p: Vec3, seg_start: Vec3, seg_end: Vec3) -> float:
    """Distance from a point to the closed segment [seg_start, seg_end]."""
    d = seg_end - seg_start
    dd = d.dot(d)
    if dd == 0.0:
        return distance(p, seg_start)
    t = (p - seg_start).dot(d) / dd
    t = min(1.0, max(0.0, t))
    return distance(p, seg_start + d.scaled(t))


@dataclass(frozen=True)
class Carrier:
    """Carrier frequency in a homogeneous propagation medium.

    The wavelength is derived, never stored, so it is consistent with
    frequency and medium index by construction.
    """

    frequency: float  # Hz
    medium_index: float = 1.0  # dimensionless, >= 1

    @property
    def wavelength(self) -> float:
        return wavelength_of(self.frequency, self.medium_index)


class MotionMode(Enum):
    STATIC = "static"
    ALONG_T = "along_t"
    ALONG_T_SCALED = "along_t_scaled"


@dataclass(frozen=True)
class MotionAssignment:
    """How an antenna or environment object follows the trajectory.

    ``factor`` multiplies the nominal displacement: 0 for static, 1 for
    co-movement, anything else (e.g. -1) for scaled comparisons.
    """

    mode: MotionMode = MotionMode.STATIC
    factor: float = 0.0

    @classmethod
    def static(cls) -> "MotionAssignment":
        return cls(MotionMode.STATIC, 0.0)

    @classmethod
    def along_t(cls) -> "MotionAssignment":
        return cls(MotionMode.ALONG_T, 1.0)

    @classmethod
    def along_t_scaled(cls, factor: float) -> "MotionAssignment":
        return cls(MotionMode.ALONG_T_SCALED, factor)

    @property
    def displacement_factor(self) -> float:
        if self.mode is MotionMode.STATIC:
            return 0.0
        return self.factor


@dataclass(frozen=True)
class Antenna:
    id: str
    initial_position: Vec3
    gain_dbi: float = 0.0  # scalar gain; radiation patterns deliberately abstracted
    motion: MotionAssignment = field(default_factory=MotionAssignment.static)


@dataclass(frozen=True)
class Trajectory:
    """Straight-line path traversed in equal steps."""

    origin: Vec3
    direction: Vec3  # unit vector
    total_length: float  # m
    step_length: float  # m

    @property
    def step_count(self) -> int:
        """Largest step index n such that n * step_length <= total_length."""
        # small epsilon so e.g. total=1.0, step=0.1 reliably yields 10
        return int(math.floor(self.total_length / self.step_length + 1e-9))


@dataclass(frozen=True)
class PointScatterer:
    position: Vec3
    reflectivity: float  # 0..1
    motion: MotionAssignment = field(default_factory=MotionAssignment.static)


@dataclass(frozen=True)
class PlaneReflector:
    point: Vec3  # any point on the plane
    normal: Vec3  # unit normal
    reflectivity: float  # 0..1
    motion: MotionAssignment = field(default_factory=MotionAssignment.static)


EnvironmentObject = Union[PointScatterer, PlaneReflector]


@dataclass(frozen=True)
class NoiseConfig:
    positioning_accuracy: float = DEFAULT_POSITIONING_ACCURACY_M  # m
    settling_epsilon: float = 0.0  # dimensionless, 0 disables settling noise
    settling_tau: float = 0.04  # s
    seed: int = DEFAULT_SEED


@dataclass(frozen=True)
class Scenario:
    carrier: Carrier
    antennas: tuple[Antenna, ...]
    tx_id: str
    rx_id: str
    trajectory: Trajectory
    objects: tuple[EnvironmentObject, ...] = ()
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    dwell_time: float = DEFAULT_DWELL_S  # s
    speed: float = DEFAULT_SPEED_MPS  # m/s, traversal speed between positions

    def antenna(self, antenna_id: str) -> Antenna:
        for a in self.antennas:
            if a.id == antenna_id:
                return a
        raise KeyError(f"no antenna with id {antenna_id!r}")

    def digest(self) -> str:
        """Stable opaque identifier of the scenario contents."""
        parts: list[str] = [
            f"carrier={self.carrier.frequency:.17g},{self.carrier.medium_index:.17g}",
            f"traj={_fmt_vec(self.trajectory.origin)};{_fmt_vec(self.trajectory.direction)};"
            f"{self.trajectory.total_length:.17g};{self.trajectory.step_length:.17g}",
            f"txrx={self.tx_id}->{self.rx_id}",
            f"dwell={self.dwell_time:.17g}",
            f"speed={self.speed:.17g}",
            f"noise={self.noise.positioning_accuracy:.17g},{self.noise.settling_epsilon:.17g},"
            f"{self.noise.settling_tau:.17g}",
        ]
        for a in self.antennas:
            parts.append(
                f"ant:{a.id}={_fmt_vec(a.initial_position)};{a.gain_dbi:.17g};"
                f"{a.motion.mode.value}:{a.motion.factor:.17g}"
            )
        for obj in self.objects:
            if isinstance(obj, PointScatterer):
                parts.append(
                    f"scat={_fmt_vec(obj.position)};{obj.reflectivity:.17g};"
                    f"{obj.motion.mode.value}:{obj.motion.factor:.17g}"
                )
            else:
                parts.append(
                    f"plane={_fmt_vec(obj.point)};{_fmt_vec(obj.normal)};{obj.reflectivity:.17g};"
                    f"{obj.motion.mode.value}:{obj.motion.factor:.17g}"
                )
        blob = "|".join(parts).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _fmt_vec(v: Vec3) -> str:
    return f"{v.x:.17g},{v.y:.17g},{v.z:.17g}"


@dataclass(frozen=True)
class ChannelSample:
    """One measured channel coefficient with its position/time stamps."""

    step_index: int
    time: float  # s
    moved_distance: float  # m, nominal traversal of the mobile mount
    h: complex  # dimensionless transmission coefficient


@dataclass(frozen=True)
class Trace:
    """Ordered channel samples from one campaign run.

    ``wavelength_m`` is carried as metadata so traces can be rendered in
    wavelength-normalized coordinates without the original scenario.
    """

    scenario_digest: str
    strategy_label: str
    samples: tuple[ChannelSample, ...]
    wavelength_m: float = float("nan")

    def __post_init__(self) -> None:
        if not self.samples:
            raise ValueError("a Trace must contain at least one sample")
        prev = self.samples[0]
        if not _finite_complex(prev.h):
            raise ValueError("sample 0: non-finite channel coefficient")
        for s in self.samples[1:]:
            if s.step_index != prev.step_index + 1:
                raise ValueError(
                    f"step_index gap: {prev.step_index} followed by {s.step_index}"
                )
            if s.time <= prev.time:
                raise ValueError(
                    f"time must be strictly increasing, got {prev.time} then {s.time}"
                )
            if not _finite_complex(s.h):
                raise ValueError(f"sample {s.step_index}: non-finite channel coefficient")
            prev = s

    def __len__(self) -> int:
        return len(self.samples)

    def step_indices(self) -> list[int]:
        return [s.step_index for s in self.samples]

    def times(self) -> list[float]:
        return [s.time for s in self.samples]

    def moved_distances(self) -> list[float]:
        return [s.moved_distance for s in self.samples]

    def values(self) -> list[complex]:
        return [s.h for s in self.samples]


def _finite_complex(h: complex) -> bool:
    return math.isfinite(h.real) and math.isfinite(h.imag)


_UNIT_TOL = 1e-12


def validate_scenario(scenario: Scenario) -> list[str]:
    """Check every scenario invariant; returns diagnostics instead of raising.

    An empty list means the scenario is well formed and can be simulated under
    any strategy without propagation singularities.
    """
    v: list[str] = []
    c = scenario.carrier
    if not math.isfinite(c.frequency) or c.frequency <= 0:
        v.append(f"carrier.frequency: must be positive and finite, got {c.frequency}")
    if not math.isfinite(c.medium_index) or c.medium_index < 1:
        v.append(f"carrier.medium_index: must be >= 1, got {c.medium_index}")

    t = scenario.trajectory
    if not t.origin.is_finite():
        v.append("trajectory.origin: components must be finite")
    if not t.direction.is_finite():
        v.append("trajectory.direction: components must be finite")
    elif abs(t.direction.norm() - 1.0) > _UNIT_TOL:
        v.append(
            f"trajectory.direction: must be unit length within {_UNIT_TOL}, "
            f"got |d| = {t.direction.norm()}"
        )
    if not math.isfinite(t.total_length) or t.total_length <= 0:
        v.append(f"trajectory.total_length: must be positive, got {t.total_length}")
    if not math.isfinite(t.step_length) or t.step_length <= 0:
        v.append(f"trajectory.step_length: must be positive, got {t.step_length}")
    elif math.isfinite(t.total_length) and t.step_length > t.total_length:
        v.append(
            f"trajectory.step_length: must not exceed total_length, "
            f"got {t.step_length} > {t.total_length}"
        )

    ids = [a.id for a in scenario.antennas]
    if len(scenario.antennas) < 2:
        v.append(f"antennas: at least 2 required, got {len(scenario.antennas)}")
    dupes = {i for i in ids if ids.count(i) > 1}
    if dupes:
        v.append(f"antennas: duplicate ids {sorted(dupes)}")
    for a in scenario.antennas:
        if not a.initial_position.is_finite():
            v.append(f"antenna {a.id}: initial_position components must be finite")
        if not math.isfinite(a.gain_dbi):
            v.append(f"antenna {a.id}: gain_dbi must be finite, got {a.gain_dbi}")
        v.extend(_check_motion(a.motion, f"antenna {a.id}.motion"))

    if scenario.tx_id == scenario.rx_id:
        v.append(f"tx_id/rx_id: must differ, both are {scenario.tx_id!r}")
    for role, aid in (("tx_id", scenario.tx_id), ("rx_id", scenario.rx_id)):
        if aid not in ids:
            v.append(f"{role}: no antenna with id {aid!r}")

    for k, obj in enumerate(scenario.objects):
        name = f"object {k}"
        if isinstance(obj, PointScatterer):
            if not obj.position.is_finite():
                v.append(f"{name}: position components must be finite")
            if not (0.0 <= obj.reflectivity <= 1.0):
                v.append(
                    f"{name}.reflectivity: must be within [0, 1], got {obj.reflectivity}"
                )
        elif isinstance(obj, PlaneReflector):
            if not obj.point.is_finite() or not obj.normal.is_finite():
                v.append(f"{name}: point/normal components must be finite")
            elif abs(obj.normal.norm() - 1.0) > _UNIT_TOL:
                v.append(
                    f"{name}.normal: must be unit length within {_UNIT_TOL}, "
                    f"got |n| = {obj.normal.norm()}"
                )
            if not (0.0 <= obj.reflectivity <= 1.0):
                v.append(
                    f"{name}.reflectivity: must be within [0, 1], got {obj.reflectivity}"
                )
        else:
            v.append(f"{name}: unknown object kind {type(obj).__name__}")
        v.extend(_check_motion(getattr(obj, "motion", MotionAssignment.static()), f"{name}.motion"))

    n = scenario.noise
    for fname, val in (
        ("positioning_accuracy", n.positioning_accuracy),
        ("settling_epsilon", n.settling_epsilon),
        ("settling_tau", n.settling_tau),
    ):
        if not math.isfinite(val) or val < 0:
            v.append(f"noise.{fname}: must be >= 0, got {val}")

    if not math.isfinite(scenario.dwell_time) or scenario.dwell_time < 0:
        v.append(f"dwell_time: must be >= 0, got {scenario.dwell_time}")
    if not math.isfinite(scenario.speed) or scenario.speed <= 0:
        v.append(f"speed: must be positive, got {scenario.speed}")

    # geometry checks only make sense once the basics hold
    if v:
        return v

    tx = scenario.antenna(scenario.tx_id)
    rx = scenario.antenna(scenario.rx_id)
    if distance(tx.initial_position, rx.initial_position) <= 0:
        v.append("antennas: initial tx-rx distance must be positive")
        return v
    v.extend(_check_sweep_clearances(scenario))
    return v


def _check_motion(m: MotionAssignment, name: str) -> list[str]:
    out = []
    if not math.isfinite(m.factor):
        out.append(f"{name}: factor must be finite, got {m.factor}")
    elif m.mode is MotionMode.ALONG_T and m.factor != 1.0:
        out.append(f"{name}: along_t requires factor 1, got {m.factor}")
    return out


# displacement factors (f_tx, f_rx) a strategy can induce: uncompensated,
# with-movement, and counter-/no-movement (both hold every strategy antenna)
_STRATEGY_FACTOR_PAIRS = ((1.0, 0.0), (1.0, 1.0), (0.0, 0.0))


def _check_sweep_clearances(scenario: Scenario) -> list[str]:
    """Reject geometries where a moving body can touch another body mid-run.

    The strategy is not part of the scenario, so relative displacements are
    checked for every (f_tx, f_rx) factor pair a strategy may induce; extra
    antennas and objects always move per their own assignment.
    """
    v: list[str] = []
    traj = scenario.trajectory
    sweep = traj.direction.scaled(traj.total_length)

    def factor_of(entity_id: str, own: float, f_tx: float, f_rx: float) -> float:
        if entity_id == scenario.tx_id:
            return f_tx
        if entity_id == scenario.rx_id:
            return f_rx
        return own

    def min_gap(p: Vec3, q: Vec3, rel: float) -> float:
        # |p - (q + rel * s * sweep)| minimized over s in [0, 1]
        if rel == 0.0:
            return distance(p, q)
        return point_segment_distance(p, q, q + sweep.scaled(rel))

    ants = scenario.antennas
    for i, a in enumerate(ants):
        for b in ants[i + 1:]:
            for f_tx, f_rx in _STRATEGY_FACTOR_PAIRS:
                fa = factor_of(a.id, a.motion.displacement_factor, f_tx, f_rx)
                fb = factor_of(b.id, b.motion.displacement_factor, f_tx, f_rx)
                if min_gap(a.initial_position, b.initial_position, fb - fa) <= 0:
                    v.append(f"antennas {a.id}/{b.id}: may become coincident during a run")
                    break

    for k, obj in enumerate(scenario.objects):
        if not isinstance(obj, PointScatterer):
            continue
        fo = obj.motion.displacement_factor
        for a in ants:
            for f_tx, f_rx in _STRATEGY_FACTOR_PAIRS:
                fa = factor_of(a.id, a.motion.displacement_factor, f_tx, f_rx)
                if min_gap(obj.position, a.initial_position, fa - fo) <= 0:
                    v.append(
                        f"object {k}: point scatterer may touch antenna {a.id} during a run"
                    )
                    break
            else:
                continue
            break

    for k, obj in enumerate(scenario.objects):
        if not isinstance(obj, PlaneReflector):
            continue
        fo = obj.motion.displacement_factor
        signs: list[float] = []
        for role in (scenario.tx_id, scenario.rx_id):
            a = scenario.antenna(role)
            for f_tx, f_rx in _STRATEGY_FACTOR_PAIRS:
                fa = factor_of(a.id, a.motion.displacement_factor, f_tx, f_rx)
                for s in (0.0, 1.0):
                    offset = sweep.scaled((fa - fo) * s)
                    signs.append((a.initial_position + offset - obj.point).dot(obj.normal))
        if any(s == 0.0 for s in signs) or (min(signs) < 0 < max(signs)):
            v.append(
                f"object {k}: plane reflector must keep tx/rx strictly on one side "
                f"for the whole run"
            )
    return v


def default_scenario(
    frequency: float = DEFAULT_FREQUENCY_HZ,
    medium_index: float = 1.0,
    separation: float = DEFAULT_SEPARATION_M,
    travel: float = DEFAULT_TRAVEL_M,
    step_lambda: float = DEFAULT_STEP_LAMBDA,
    objects: tuple[EnvironmentObject, ...] = (),
    noise: NoiseConfig | None = None,
    dwell_time: float = DEFAULT_DWELL_S,
    speed: float = DEFAULT_SPEED_MPS,
) -> Scenario:
    """Two-antenna scenario calibrated against the reference measurements.

    Antenna A starts at the origin and moves away from antenna B along +x,
    so the line-of-sight distance grows from ``separation`` by ``travel``.
    """
    carrier = Carrier(frequency, medium_index)
    step = step_lambda * carrier.wavelength
    return Scenario(
        carrier=carrier,
        antennas=(
            Antenna("A", Vec3(0.0, 0.0, 0.0)),
            Antenna("B", Vec3(-separation, 0.0, 0.0)),
        ),
        tx_id="A",
        rx_id="B",
        trajectory=Trajectory(Vec3(0.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0), travel, step),
        objects=objects,
        noise=noise if noise is not None else NoiseConfig(),
        dwell_time=dwell_time,
        speed=speed,
    )


def clutter_scenario(noise: NoiseConfig | None = None) -> Scenario:
    """Default scenario plus three weak static scatterers near the rig.

    Stands in for uncovered metal parts around an absorber-lined enclosure;
    reflectivities are kept at or below 0.3 so the compensated run stays
    static to within a fraction of a radian.
    """
    scatterers = (
        PointScatterer(Vec3(0.35, 0.62, -0.45), 0.15),
        PointScatterer(Vec3(1.9, -0.55, -0.38), 0.18),
        PointScatterer(Vec3(0.95, 0.48, 0.52), 0.09),
    )
    return default_scenario(objects=scatterers, noise=noise)


def zero_noise() -> NoiseConfig:
    """Noise configuration with every perturbation disabled."""
    return NoiseConfig(positioning_accuracy=0.0, settling_epsilon=0.0, settling_tau=0.04)


__all__ = [
    "C0",
    "DEFAULT_SEED",
    "Vec3",
    "Carrier",
    "MotionMode",
    "MotionAssignment",
    "Antenna",
    "Trajectory",
    "PointScatterer",
    "PlaneReflector",
    "EnvironmentObject",
    "NoiseConfig",
    "Scenario",
    "ChannelSample",
    "Trace",
    "wavelength_of",
    "distance",
    "point_segment_distance",
    "validate_scenario",
    "default_scenario",
    "clutter_scenario",
    "zero_noise",
]
