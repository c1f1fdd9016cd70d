"""Key-value text formats: scenario files and model parameter files.

Scenario files are INI-style with the sections [carrier], [trajectory],
[antenna.<id>], [object.<n>], [noise] and [run]. Unknown sections or keys are
rejected so typos fail loudly. Model parameters use a single [model] section
with keys h0_db, h0_phase_rad, var_amp_db2 and var_phase_rad2.
"""

from __future__ import annotations

import cmath
import configparser
import io
import math

from .core import (
    DEFAULT_DWELL_S,
    DEFAULT_POSITIONING_ACCURACY_M,
    DEFAULT_SEED,
    DEFAULT_SPEED_MPS,
    Antenna,
    Carrier,
    EnvironmentObject,
    MotionAssignment,
    MotionMode,
    NoiseConfig,
    PlaneReflector,
    PointScatterer,
    Scenario,
    Trajectory,
    Vec3,
)
from .model import ResidualModel, StaticChannelModel


class ScenarioFormatError(ValueError):
    """A scenario or model parameter file is malformed; the message names the key."""


_CARRIER_KEYS = {"frequency_hz", "medium_index"}
_TRAJECTORY_KEYS = {"origin", "direction", "total_length_m", "step_length_m"}
_ANTENNA_KEYS = {"position", "gain_dbi", "motion"}
_SCATTERER_KEYS = {"kind", "position", "reflectivity", "motion"}
_PLANE_KEYS = {"kind", "point", "normal", "reflectivity", "motion"}
_NOISE_KEYS = {"positioning_accuracy_m", "settling_epsilon", "settling_tau_s", "seed"}
_RUN_KEYS = {"tx", "rx", "dwell_time_s", "speed_mps"}
_MODEL_KEYS = {"h0_db", "h0_phase_rad", "var_amp_db2", "var_phase_rad2"}


def _read_ini(text: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep key case
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ScenarioFormatError(f"malformed key-value text: {exc}") from exc
    return parser

def _float(section: str, key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ScenarioFormatError(f"[{section}] {key}: not a number: {value!r}")


def _int(section: str, key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ScenarioFormatError(f"[{section}] {key}: not an integer: {value!r}")


def _vec(section: str, key: str, value: str) -> Vec3:
    parts = value.replace(",", " ").split()
    if len(parts) != 3:
        raise ScenarioFormatError(
            f"[{section}] {key}: expected three components, got {value!r}"
        )
    try:
        x, y, z = (float(p) for p in parts)
    except ValueError:
        raise ScenarioFormatError(f"[{section}] {key}: not numeric: {value!r}")
    return Vec3(x, y, z)


def _motion(section: str, value: str) -> MotionAssignment:
    token = value.strip()
    if token == "static":
        return MotionAssignment.static()
    if token == "along_t":
        return MotionAssignment.along_t()
    if token.startswith("along_t_scaled:"):
        factor_text = token.split(":", 1)[1]
        try:
            return MotionAssignment.along_t_scaled(float(factor_text))
        except ValueError:
            raise ScenarioFormatError(
                f"[{section}] motion: bad scale factor {factor_text!r}"
            )
    raise ScenarioFormatError(
        f"[{section}] motion: expected static, along_t or along_t_scaled:<factor>, "
        f"got {value!r}"
    )


def _check_keys(section: str, present, allowed: set[str], required: set[str]) -> None:
    unknown = set(present) - allowed
    if unknown:
        raise ScenarioFormatError(f"[{section}]: unknown key(s) {sorted(unknown)}")
    missing = required - set(present)
    if missing:
        raise ScenarioFormatError(f"[{section}]: missing required key(s) {sorted(missing)}")


def parse_scenario_text(text: str) -> Scenario:
    """Parse a scenario file; raises ScenarioFormatError naming the offender."""
    parser = _read_ini(text)
    sections = set(parser.sections())

    for required in ("carrier", "trajectory", "run"):
        if required not in sections:
            raise ScenarioFormatError(f"missing required section [{required}]")

    known = {"carrier", "trajectory", "noise", "run"}
    antenna_sections = sorted(s for s in sections if s.startswith("antenna."))
    object_sections = sorted(
        (s for s in sections if s.startswith("object.")),
        key=lambda s: s.split(".", 1)[1],
    )
    stray = sections - known - set(antenna_sections) - set(object_sections)
    if stray:
        raise ScenarioFormatError(f"unknown section(s) {sorted(stray)}")
    if len(antenna_sections) < 2:
        raise ScenarioFormatError("at least two [antenna.<id>] sections are required")

    sec = parser["carrier"]
    _check_keys("carrier", sec.keys(), _CARRIER_KEYS, {"frequency_hz"})
    carrier = Carrier(
        frequency=_float("carrier", "frequency_hz", sec["frequency_hz"]),
        medium_index=_float("carrier", "medium_index", sec.get("medium_index", "1.0")),
    )

    sec = parser["trajectory"]
    _check_keys("trajectory", sec.keys(), _TRAJECTORY_KEYS, _TRAJECTORY_KEYS)
    trajectory = Trajectory(
        origin=_vec("trajectory", "origin", sec["origin"]),
        direction=_vec("trajectory", "direction", sec["direction"]),
        total_length=_float("trajectory", "total_length_m", sec["total_length_m"]),
        step_length=_float("trajectory", "step_length_m", sec["step_length_m"]),
    )

    antennas = []
    for name in antenna_sections:
        aid = name.split(".", 1)[1]
        if not aid:
            raise ScenarioFormatError(f"[{name}]: empty antenna id")
        sec = parser[name]
        _check_keys(name, sec.keys(), _ANTENNA_KEYS, {"position"})
        antennas.append(
            Antenna(
                id=aid,
                initial_position=_vec(name, "position", sec["position"]),
                gain_dbi=_float(name, "gain_dbi", sec.get("gain_dbi", "0.0")),
                motion=_motion(name, sec.get("motion", "static")),
            )
        )

    objects: list[EnvironmentObject] = []
    for name in object_sections:
        sec = parser[name]
        kind = sec.get("kind", "")
        if kind == "point_scatterer":
            _check_keys(name, sec.keys(), _SCATTERER_KEYS, {"kind", "position", "reflectivity"})
            objects.append(
                PointScatterer(
                    position=_vec(name, "position", sec["position"]),
                    reflectivity=_float(name, "reflectivity", sec["reflectivity"]),
                    motion=_motion(name, sec.get("motion", "static")),
                )
            )
        elif kind == "plane_reflector":
            _check_keys(name, sec.keys(), _PLANE_KEYS, {"kind", "point", "normal", "reflectivity"})
            objects.append(
                PlaneReflector(
                    point=_vec(name, "point", sec["point"]),
                    normal=_vec(name, "normal", sec["normal"]),
                    reflectivity=_float(name, "reflectivity", sec["reflectivity"]),
                    motion=_motion(name, sec.get("motion", "static")),
                )
            )
        else:
            raise ScenarioFormatError(
                f"[{name}] kind: expected point_scatterer or plane_reflector, got {kind!r}"
            )

    if "noise" in sections:
        sec = parser["noise"]
        _check_keys("noise", sec.keys(), _NOISE_KEYS, set())
        noise = NoiseConfig(
            positioning_accuracy=_float(
                "noise",
                "positioning_accuracy_m",
                sec.get("positioning_accuracy_m", str(DEFAULT_POSITIONING_ACCURACY_M)),
            ),
            settling_epsilon=_float(
                "noise", "settling_epsilon", sec.get("settling_epsilon", "0.0")
            ),
            settling_tau=_float("noise", "settling_tau_s", sec.get("settling_tau_s", "0.04")),
            seed=_int("noise", "seed", sec.get("seed", str(DEFAULT_SEED))),
        )
    else:
        noise = NoiseConfig()

    sec = parser["run"]
    _check_keys("run", sec.keys(), _RUN_KEYS, {"tx", "rx"})
    return Scenario(
        carrier=carrier,
        antennas=tuple(antennas),
        tx_id=sec["tx"].strip(),
        rx_id=sec["rx"].strip(),
        trajectory=trajectory,
        objects=tuple(objects),
        noise=noise,
        dwell_time=_float("run", "dwell_time_s", sec.get("dwell_time_s", str(DEFAULT_DWELL_S))),
        speed=_float("run", "speed_mps", sec.get("speed_mps", str(DEFAULT_SPEED_MPS))),
    )


def _fv(x: float) -> str:
    return repr(float(x))


def _vec_text(v: Vec3) -> str:
    return f"{_fv(v.x)} {_fv(v.y)} {_fv(v.z)}"


def _motion_text(m: MotionAssignment) -> str:
    if m.mode is MotionMode.STATIC:
        return "static"
    if m.mode is MotionMode.ALONG_T:
        return "along_t"
    return f"along_t_scaled:{_fv(m.factor)}"


def render_scenario(scenario: Scenario) -> str:
    """Render a scenario in the file format; parse_scenario_text inverts this."""
    out = io.StringIO()
    out.write("[carrier]\n")
    out.write(f"frequency_hz = {_fv(scenario.carrier.frequency)}\n")
    out.write(f"medium_index = {_fv(scenario.carrier.medium_index)}\n")
    out.write("\n[trajectory]\n")
    t = scenario.trajectory
    out.write(f"origin = {_vec_text(t.origin)}\n")
    out.write(f"direction = {_vec_text(t.direction)}\n")
    out.write(f"total_length_m = {_fv(t.total_length)}\n")
    out.write(f"step_length_m = {_fv(t.step_length)}\n")
    for a in scenario.antennas:
        out.write(f"\n[antenna.{a.id}]\n")
        out.write(f"position = {_vec_text(a.initial_position)}\n")
        out.write(f"gain_dbi = {_fv(a.gain_dbi)}\n")
        out.write(f"motion = {_motion_text(a.motion)}\n")
    for k, obj in enumerate(scenario.objects):
        out.write(f"\n[object.{k}]\n")
        if isinstance(obj, PointScatterer):
            out.write("kind = point_scatterer\n")
            out.write(f"position = {_vec_text(obj.position)}\n")
        else:
            out.write("kind = plane_reflector\n")
            out.write(f"point = {_vec_text(obj.point)}\n")
            out.write(f"normal = {_vec_text(obj.normal)}\n")
        out.write(f"reflectivity = {_fv(obj.reflectivity)}\n")
        out.write(f"motion = {_motion_text(obj.motion)}\n")
    n = scenario.noise
    out.write("\n[noise]\n")
    out.write(f"positioning_accuracy_m = {_fv(n.positioning_accuracy)}\n")
    out.write(f"settling_epsilon = {_fv(n.settling_epsilon)}\n")
    out.write(f"settling_tau_s = {_fv(n.settling_tau)}\n")
    out.write(f"seed = {n.seed}\n")
    out.write("\n[run]\n")
    out.write(f"tx = {scenario.tx_id}\n")
    out.write(f"rx = {scenario.rx_id}\n")
    out.write(f"dwell_time_s = {_fv(scenario.dwell_time)}\n")
    out.write(f"speed_mps = {_fv(scenario.speed)}\n")
    return out.getvalue()


def model_params_text(model: StaticChannelModel, residual: ResidualModel) -> str:
    """Serialize fitted model parameters in the key-value format."""
    return (
        "[model]\n"
        f"h0_db = {_fv(model.magnitude_db)}\n"
        f"h0_phase_rad = {_fv(model.phase)}\n"
        f"var_amp_db2 = {_fv(residual.var_amp)}\n"
        f"var_phase_rad2 = {_fv(residual.var_phase)}\n"
    )


def parse_model_params(text: str) -> tuple[StaticChannelModel, ResidualModel]:
    """Parse a [model] parameter file back into model objects."""
    parser = _read_ini(text)
    if "model" not in parser.sections():
        raise ScenarioFormatError("missing required section [model]")
    stray = set(parser.sections()) - {"model"}
    if stray:
        raise ScenarioFormatError(f"unknown section(s) {sorted(stray)}")
    sec = parser["model"]
    _check_keys("model", sec.keys(), _MODEL_KEYS, _MODEL_KEYS)
    h0_db = _float("model", "h0_db", sec["h0_db"])
    h0_phase = _float("model", "h0_phase_rad", sec["h0_phase_rad"])
    var_amp = _float("model", "var_amp_db2", sec["var_amp_db2"])
    var_phase = _float("model", "var_phase_rad2", sec["var_phase_rad2"])
    if not all(math.isfinite(x) for x in (h0_db, h0_phase, var_amp, var_phase)):
        raise ScenarioFormatError("[model]: parameters must be finite")
    if var_amp < 0 or var_phase < 0:
        raise ScenarioFormatError("[model]: variances must be >= 0")
    model = StaticChannelModel(10.0 ** (h0_db / 20.0) * cmath.exp(1j * h0_phase))
    return model, ResidualModel(var_amp=var_amp, var_phase=var_phase)
