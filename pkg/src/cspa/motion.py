"""Per-step geometry planning under a movement strategy.

The strategy governs the tx antenna (the mobile one, "A") and the rx antenna
(the partner, "B"). Any further antennas and all environment objects follow
their own motion assignment in every strategy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .core import (
    Antenna,
    EnvironmentObject,
    PlaneReflector,
    PointScatterer,
    Scenario,
    Vec3,
)


class Strategy(Enum):
    UNCOMPENSATED = "uncompensated"
    WITH_MOVEMENT = "with_movement"
    COUNTER_MOVEMENT = "counter_movement"
    NO_MOVEMENT = "no_movement"


# effective displacement factor of (tx, rx) per strategy; counter-movement is
# idealized as a perfect position hold
_STRATEGY_FACTORS: dict[Strategy, tuple[float, float]] = {
    Strategy.UNCOMPENSATED: (1.0, 0.0),
    Strategy.WITH_MOVEMENT: (1.0, 1.0),
    Strategy.COUNTER_MOVEMENT: (0.0, 0.0),
    Strategy.NO_MOVEMENT: (0.0, 0.0),
}


@dataclass(frozen=True)
class StepPlan:
    """Target geometry for one step before measurement.

    ``moving_ids`` lists the antennas that physically translate during the
    run and are therefore subject to positioning error.
    """

    step_index: int
    nominal_moved_distance: float  # m, always n * step_length
    axis: Vec3  # trajectory direction, the axis positioning error acts along
    antenna_positions: dict[str, Vec3]
    moving_ids: frozenset[str]
    objects: tuple[EnvironmentObject, ...]


def _antenna_factor(antenna: Antenna, scenario: Scenario, strategy: Strategy) -> float:
    f_tx, f_rx = _STRATEGY_FACTORS[strategy]
    if antenna.id == scenario.tx_id:
        return f_tx
    if antenna.id == scenario.rx_id:
        return f_rx
    return antenna.motion.displacement_factor


def plan_step(scenario: Scenario, strategy: Strategy, n: int) -> StepPlan:
    """Nominal positions of all antennas and objects at step n."""
    max_n = scenario.trajectory.step_count
    if not 0 <= n <= max_n:
        raise ValueError(f"step index {n} out of range [0, {max_n}]")
    direction = scenario.trajectory.direction
    moved = n * scenario.trajectory.step_length

    positions: dict[str, Vec3] = {}
    moving: set[str] = set()
    for a in scenario.antennas:
        factor = _antenna_factor(a, scenario, strategy)
        if factor == 0.0:
            positions[a.id] = a.initial_position
        else:
            positions[a.id] = a.initial_position + direction.scaled(factor * moved)
            moving.add(a.id)

    displaced: list[EnvironmentObject] = []
    for obj in scenario.objects:
        factor = obj.motion.displacement_factor
        if factor == 0.0:
            displaced.append(obj)
        elif isinstance(obj, PointScatterer):
            displaced.append(
                replace(obj, position=obj.position + direction.scaled(factor * moved))
            )
        elif isinstance(obj, PlaneReflector):
            displaced.append(replace(obj, point=obj.point + direction.scaled(factor * moved)))
        else:
            raise ValueError(f"unknown environment object {type(obj).__name__}")

    return StepPlan(
        step_index=n,
        nominal_moved_distance=moved,
        axis=direction,
        antenna_positions=positions,
        moving_ids=frozenset(moving),
        objects=tuple(displaced),
    )


def apply_positioning_error(
    plan: StepPlan, accuracy: float, rng: np.random.Generator
) -> StepPlan:
    """Jitter every moving antenna along the trajectory axis.

    Each moving antenna gets an independent uniform draw in
    [-accuracy, +accuracy]; static antennas are untouched. With accuracy 0 the
    plan is returned unchanged and the rng is not consumed.
    """
    if accuracy < 0:
        raise ValueError(f"accuracy must be >= 0, got {accuracy}")
    if accuracy == 0.0 or not plan.moving_ids:
        return plan
    perturbed: dict[str, Vec3] = {}
    for aid, pos in plan.antenna_positions.items():
        if aid in plan.moving_ids:
            offset = rng.uniform(-accuracy, accuracy)
            perturbed[aid] = pos + plan.axis.scaled(offset)
        else:
            perturbed[aid] = pos
    return replace(plan, antenna_positions=perturbed)


def settling_perturbation(
    dwell_time: float, epsilon: float, tau: float, rng: np.random.Generator
) -> complex:
    """Residual mechanical vibration after dwelling, as a complex multiplier.

    Returns (1 + a) * exp(i b) with a, b zero-mean Gaussian draws of standard
    deviation epsilon * exp(-dwell_time / tau); the multiplier tends to 1 as
    the dwell grows. When the scale is zero the rng is not consumed.
    """
    if dwell_time < 0 or epsilon < 0 or tau < 0:
        raise ValueError("dwell_time, epsilon and tau must all be >= 0")
    if tau == 0.0:
        # no decay timescale: settled immediately unless there is no dwell at all
        scale = epsilon if dwell_time == 0.0 else 0.0
    else:
        scale = epsilon * math.exp(-dwell_time / tau)
    if scale == 0.0:
        return 1.0 + 0.0j
    amp = rng.normal(0.0, scale)
    phase = rng.normal(0.0, scale)
    return (1.0 + amp) * cmath.exp(1j * phase)
