import math

import numpy as np
import pytest

from cspa.core import (
    Antenna,
    MotionAssignment,
    PlaneReflector,
    PointScatterer,
    Scenario,
    Vec3,
    default_scenario,
    zero_noise,
)
from cspa.motion import (
    Strategy,
    apply_positioning_error,
    plan_step,
    settling_perturbation,
)

LAM = default_scenario().carrier.wavelength


def test_plan_step_identity_at_n0(free_space):
    plan = plan_step(free_space, Strategy.WITH_MOVEMENT, 0)
    for a in free_space.antennas:
        assert plan.antenna_positions[a.id] == a.initial_position
    assert plan.nominal_moved_distance == 0.0


def test_plan_step_uncompensated_moves_only_tx(free_space):
    plan = plan_step(free_space, Strategy.UNCOMPENSATED, 20)
    # 20 steps of 0.05 lambda = exactly one wavelength
    assert plan.antenna_positions["A"].x == pytest.approx(LAM, rel=1e-15)
    assert plan.antenna_positions["B"] == free_space.antenna("B").initial_position
    assert plan.moving_ids == frozenset({"A"})
    assert plan.nominal_moved_distance == pytest.approx(LAM, rel=1e-15)


def test_plan_step_with_movement_preserves_separation_exactly(free_space):
    base = plan_step(free_space, Strategy.WITH_MOVEMENT, 0)
    rel0 = base.antenna_positions["A"] - base.antenna_positions["B"]
    for n in (1, 20, 113, free_space.trajectory.step_count):
        plan = plan_step(free_space, Strategy.WITH_MOVEMENT, n)
        rel = plan.antenna_positions["A"] - plan.antenna_positions["B"]
        assert rel == rel0


def test_plan_step_counter_movement_holds_tx(free_space):
    for n in (0, 5, 100):
        plan = plan_step(free_space, Strategy.COUNTER_MOVEMENT, n)
        assert plan.antenna_positions["A"] == free_space.antenna("A").initial_position
        assert plan.antenna_positions["B"] == free_space.antenna("B").initial_position
        assert plan.nominal_moved_distance == n * free_space.trajectory.step_length
        assert plan.moving_ids == frozenset()


def test_plan_step_out_of_range(free_space):
    max_n = free_space.trajectory.step_count
    with pytest.raises(ValueError, match="out of range"):
        plan_step(free_space, Strategy.WITH_MOVEMENT, max_n + 1)
    with pytest.raises(ValueError, match="out of range"):
        plan_step(free_space, Strategy.WITH_MOVEMENT, -1)


def test_plan_step_is_pure(free_space):
    a = plan_step(free_space, Strategy.UNCOMPENSATED, 17)
    b = plan_step(free_space, Strategy.UNCOMPENSATED, 17)
    assert a == b


def test_objects_follow_their_own_assignment():
    moving = PointScatterer(Vec3(0.2, 1.0, 0.0), 0.3, MotionAssignment.along_t())
    counter = PointScatterer(Vec3(0.2, -1.0, 0.0), 0.3, MotionAssignment.along_t_scaled(-1.0))
    fixed = PlaneReflector(Vec3(0, 0, -1.0), Vec3(0, 0, 1.0), 0.2)
    s = default_scenario(objects=(moving, counter, fixed), noise=zero_noise())
    step = s.trajectory.step_length
    plan = plan_step(s, Strategy.NO_MOVEMENT, 10)
    assert plan.objects[0].position.x == pytest.approx(0.2 + 10 * step, rel=1e-15)
    assert plan.objects[1].position.x == pytest.approx(0.2 - 10 * step, rel=1e-15)
    assert plan.objects[2] == fixed


def test_third_antenna_keeps_constant_offset_to_tx():
    s = default_scenario(noise=zero_noise())
    third = Antenna("C", Vec3(0.0, 2.0, 0.0), motion=MotionAssignment.along_t())
    s = Scenario(
        carrier=s.carrier,
        antennas=s.antennas + (third,),
        tx_id=s.tx_id,
        rx_id=s.rx_id,
        trajectory=s.trajectory,
        noise=s.noise,
        dwell_time=s.dwell_time,
        speed=s.speed,
    )
    base = plan_step(s, Strategy.WITH_MOVEMENT, 0)
    rel0 = base.antenna_positions["C"] - base.antenna_positions["A"]
    for n in (3, 50, 200):
        plan = plan_step(s, Strategy.WITH_MOVEMENT, n)
        assert plan.antenna_positions["C"] - plan.antenna_positions["A"] == rel0
        assert "C" in plan.moving_ids


def test_positioning_error_zero_accuracy_is_identity(free_space, rng):
    plan = plan_step(free_space, Strategy.WITH_MOVEMENT, 7)
    assert apply_positioning_error(plan, 0.0, rng) is plan


def test_positioning_error_bounded_and_axis_aligned(free_space):
    rng = np.random.default_rng(5)
    for n in range(40):
        plan = plan_step(free_space, Strategy.WITH_MOVEMENT, n)
        jittered = apply_positioning_error(plan, 2e-5, rng)
        for aid, pos in jittered.antenna_positions.items():
            delta = pos - plan.antenna_positions[aid]
            if aid in plan.moving_ids:
                assert abs(delta.x) <= 2e-5
                assert delta.y == 0.0 and delta.z == 0.0
            else:
                assert pos == plan.antenna_positions[aid]


def test_positioning_error_leaves_static_antennas_untouched(free_space):
    rng = np.random.default_rng(5)
    plan = plan_step(free_space, Strategy.UNCOMPENSATED, 9)
    jittered = apply_positioning_error(plan, 1e-4, rng)
    assert jittered.antenna_positions["B"] == plan.antenna_positions["B"]
    assert jittered.antenna_positions["A"] != plan.antenna_positions["A"]


def test_positioning_error_deterministic_per_seed(free_space):
    plan = plan_step(free_space, Strategy.WITH_MOVEMENT, 9)
    a = apply_positioning_error(plan, 2e-5, np.random.default_rng(42))
    b = apply_positioning_error(plan, 2e-5, np.random.default_rng(42))
    assert a == b


def test_positioning_error_rejects_negative_accuracy(free_space, rng):
    plan = plan_step(free_space, Strategy.WITH_MOVEMENT, 0)
    with pytest.raises(ValueError):
        apply_positioning_error(plan, -1e-6, rng)


def test_settling_disabled_is_exactly_one(rng):
    assert settling_perturbation(0.2, 0.0, 0.04, rng) == 1 + 0j


def test_settling_scale_decays_exponentially():
    # dwell 0.2 s with tau 0.04 s leaves a e^-5 residual scale
    expected_scale = 0.05 * 0.006737946999085467
    draws = np.array(
        [
            settling_perturbation(0.2, 0.05, 0.04, rng).imag
            for rng in (np.random.default_rng(s) for s in range(4000))
        ]
    )
    # imaginary part ~ beta for small beta
    assert np.std(draws) == pytest.approx(expected_scale, rel=0.05)


def test_settling_no_dwell_uses_full_epsilon():
    draws = []
    rng = np.random.default_rng(3)
    for _ in range(4000):
        m = settling_perturbation(0.0, 0.05, 0.04, rng)
        draws.append(abs(m) - 1.0)
    assert np.std(draws) == pytest.approx(0.05, rel=0.05)


def test_settling_tau_zero_cases(rng):
    assert settling_perturbation(0.1, 0.05, 0.0, rng) == 1 + 0j  # settled instantly
    m = settling_perturbation(0.0, 0.05, 0.0, np.random.default_rng(0))
    assert m != 1 + 0j  # both zero: scale falls back to epsilon


def test_settling_rejects_negative_arguments(rng):
    with pytest.raises(ValueError):
        settling_perturbation(-0.1, 0.0, 0.04, rng)
    with pytest.raises(ValueError):
        settling_perturbation(0.1, -0.1, 0.04, rng)
    with pytest.raises(ValueError):
        settling_perturbation(0.1, 0.1, -0.04, rng)


def test_counter_movement_trace_equals_no_movement():
    from cspa.campaign import run

    s = default_scenario(noise=zero_noise())
    counter = run(s, Strategy.COUNTER_MOVEMENT, 11)
    still = run(s, Strategy.NO_MOVEMENT, 11)
    assert counter.samples == still.samples
