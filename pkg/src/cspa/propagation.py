"""Complex channel coefficient between two antennas for one geometry.

Line-of-sight plus optional single-bounce multipath (point scatterers and
infinite plane reflectors via the image-source construction).

Phase convention: engineering time convention, phase decreases with path
length, h ~ exp(-i 2 pi d / lambda).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import (
    Carrier,
    EnvironmentObject,
    PlaneReflector,
    PointScatterer,
    Scenario,
    Trace,
    Vec3,
    distance,
)

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GeometryState:
    """Positions of every antenna and environment object at one step.

    Plane reflectors carry their translated anchor point and unchanged normal.
    Objects appear in the same order as in the owning scenario.
    """

    antennas: Mapping[str, Vec3]
    objects: tuple[EnvironmentObject, ...] = ()


@dataclass(frozen=True)
class PathContribution:
    kind: str  # "los", "scatter" or "image"
    path_length: float  # m
    amplitude: float  # dimensionless, >= 0
    phase: float  # rad, wrapped to (-pi, pi]


def _ray(amplitude: float, path_length: float, wavelength: float) -> complex:
    return amplitude * cmath.exp(-1j * _TWO_PI * path_length / wavelength)


def los_channel(
    pa: Vec3,
    pb: Vec3,
    carrier: Carrier,
    gains_dbi: tuple[float, float] = (0.0, 0.0),
) -> complex:
    """Free-space line-of-sight channel g * (lambda / 4 pi d) * e^(-i 2 pi d / lambda)."""
    d = distance(pa, pb)
    if d <= 0.0:
        raise ValueError("los_channel: antenna positions coincide")
    lam = carrier.wavelength
    g = 10.0 ** ((gains_dbi[0] + gains_dbi[1]) / 20.0)
    return _ray(g * lam / (4.0 * math.pi * d), d, lam)


def point_scatter_contribution(
    pa: Vec3, scatterer: Vec3, pb: Vec3, carrier: Carrier, reflectivity: float
) -> complex:
    """Single bounce off a point scatterer, amplitude G * lambda / (4 pi (d1 + d2))."""
    d1 = distance(pa, scatterer)
    d2 = distance(scatterer, pb)
    if d1 <= 0.0 or d2 <= 0.0:
        raise ValueError("point_scatter_contribution: scatterer coincides with an antenna")
    lam = carrier.wavelength
    return _ray(reflectivity * lam / (4.0 * math.pi * (d1 + d2)), d1 + d2, lam)


def plane_image_contribution(
    pa: Vec3,
    plane: tuple[Vec3, Vec3],
    pb: Vec3,
    carrier: Carrier,
    reflectivity: float,
) -> complex:
    """Single bounce off an infinite plane via the exact image-source method.

    ``plane`` is (point on plane, unit normal); both antennas must lie
    strictly on the same side.
    """
    point, normal = plane
    sa = (pa - point).dot(normal)
    sb = (pb - point).dot(normal)
    if sa == 0.0 or sb == 0.0 or (sa > 0.0) != (sb > 0.0):
        raise ValueError(
            "plane_image_contribution: antennas must be strictly on the same side of the plane"
        )
    mirrored = pa - normal.scaled(2.0 * sa)
    return reflectivity * los_channel(mirrored, pb, carrier)


def total_channel(
    state: GeometryState,
    scenario: Scenario,
    tx_id: str | None = None,
    rx_id: str | None = None,
) -> complex:
    """Sum of line of sight and all single-bounce contributions.

    The pair defaults to the scenario's tx/rx but any two antennas present in
    the state may be selected, e.g. to inspect the link towards a third
    antenna.
    """
    tx = tx_id if tx_id is not None else scenario.tx_id
    rx = rx_id if rx_id is not None else scenario.rx_id
    if tx not in state.antennas or rx not in state.antennas:
        raise ValueError(f"geometry state is missing antenna {tx!r} or {rx!r}")
    if len(state.objects) != len(scenario.objects):
        raise ValueError(
            f"geometry state carries {len(state.objects)} objects, "
            f"scenario has {len(scenario.objects)}"
        )
    pa = state.antennas[tx]
    pb = state.antennas[rx]
    gains = (scenario.antenna(tx).gain_dbi, scenario.antenna(rx).gain_dbi)
    h = los_channel(pa, pb, scenario.carrier, gains)
    for obj in state.objects:
        if isinstance(obj, PointScatterer):
            h += point_scatter_contribution(
                pa, obj.position, pb, scenario.carrier, obj.reflectivity
            )
        elif isinstance(obj, PlaneReflector):
            h += plane_image_contribution(
                pa, (obj.point, obj.normal), pb, scenario.carrier, obj.reflectivity
            )
        else:
            raise ValueError(f"unknown environment object {type(obj).__name__}")
    return h


def path_contributions(
    state: GeometryState,
    scenario: Scenario,
    tx_id: str | None = None,
    rx_id: str | None = None,
) -> list[PathContribution]:
    """Per-path breakdown of total_channel for diagnostics."""
    tx = tx_id if tx_id is not None else scenario.tx_id
    rx = rx_id if rx_id is not None else scenario.rx_id
    pa = state.antennas[tx]
    pb = state.antennas[rx]
    lam = scenario.carrier.wavelength
    gains = (scenario.antenna(tx).gain_dbi, scenario.antenna(rx).gain_dbi)

    def wrapped(length: float) -> float:
        phase = math.fmod(-_TWO_PI * length / lam, _TWO_PI)
        if phase <= -math.pi:
            phase += _TWO_PI
        elif phase > math.pi:
            phase -= _TWO_PI
        return phase

    d = distance(pa, pb)
    g = 10.0 ** ((gains[0] + gains[1]) / 20.0)
    out = [PathContribution("los", d, g * lam / (4.0 * math.pi * d), wrapped(d))]
    for obj in state.objects:
        if isinstance(obj, PointScatterer):
            length = distance(pa, obj.position) + distance(obj.position, pb)
            out.append(
                PathContribution(
                    "scatter",
                    length,
                    obj.reflectivity * lam / (4.0 * math.pi * length),
                    wrapped(length),
                )
            )
        elif isinstance(obj, PlaneReflector):
            sa = (pa - obj.point).dot(obj.normal)
            mirrored = pa - obj.normal.scaled(2.0 * sa)
            length = distance(mirrored, pb)
            out.append(
                PathContribution(
                    "image",
                    length,
                    obj.reflectivity * lam / (4.0 * math.pi * length),
                    wrapped(length),
                )
            )
    return out


def instantaneous_frequency(trace: Trace) -> np.ndarray:
    """Discrete instantaneous frequency, the time derivative of the unwrapped phase.

    Returns one value per sample pair, length len(trace) - 1.
    """
    if len(trace) < 2:
        raise ValueError("instantaneous_frequency needs at least 2 samples")
    times = np.asarray(trace.times())
    dt = np.diff(times)
    if np.any(dt == 0.0):
        raise ValueError("instantaneous_frequency: duplicate timestamps")
    phase = np.unwrap(np.angle(np.asarray(trace.values())))
    return np.diff(phase) / (_TWO_PI * dt)
