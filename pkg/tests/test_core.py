import math

import pytest
from hypothesis import given, strategies as st

from cspa.core import (
    Antenna,
    Carrier,
    ChannelSample,
    MotionAssignment,
    NoiseConfig,
    PointScatterer,
    Scenario,
    Trace,
    Trajectory,
    Vec3,
    default_scenario,
    clutter_scenario,
    distance,
    point_segment_distance,
    validate_scenario,
    wavelength_of,
    zero_noise,
)

# c0 / 2.45e9, frozen from direct division
LAMBDA_245 = 0.12236426857142857


def test_wavelength_ism_band():
    assert wavelength_of(2.45e9, 1.0) == pytest.approx(LAMBDA_245, rel=1e-15)


def test_wavelength_at_c0_is_one_meter():
    assert wavelength_of(299792458.0, 1.0) == 1.0


def test_wavelength_denser_medium_halves():
    assert wavelength_of(2.45e9, 2.0) == pytest.approx(LAMBDA_245 / 2.0, rel=1e-15)


def test_wavelength_rejects_bad_arguments():
    with pytest.raises(ValueError):
        wavelength_of(0.0)
    with pytest.raises(ValueError):
        wavelength_of(-1e9)
    with pytest.raises(ValueError):
        wavelength_of(1e9, 0.5)


@given(
    f1=st.floats(1e3, 1e12),
    scale=st.floats(1.0001, 1e3),
    n=st.floats(1.0, 10.0),
)
def test_wavelength_strictly_decreasing_in_frequency(f1, scale, n):
    assert wavelength_of(f1 * scale, n) < wavelength_of(f1, n)


@given(
    f=st.floats(1e3, 1e12),
    n1=st.floats(1.0, 10.0),
    scale=st.floats(1.0001, 1e2),
)
def test_wavelength_strictly_decreasing_in_medium_index(f, n1, scale):
    assert wavelength_of(f, n1 * scale) < wavelength_of(f, n1)


def test_carrier_wavelength_consistent():
    c = Carrier(2.45e9, 1.5)
    assert abs(c.wavelength * c.medium_index * c.frequency / 299792458.0 - 1.0) < 1e-12


def test_default_scenario_is_valid():
    assert validate_scenario(default_scenario()) == []
    assert validate_scenario(clutter_scenario()) == []


def test_validate_flags_identical_tx_rx():
    s = default_scenario()
    bad = Scenario(
        carrier=s.carrier,
        antennas=s.antennas,
        tx_id="A",
        rx_id="A",
        trajectory=s.trajectory,
    )
    violations = validate_scenario(bad)
    assert len(violations) == 1
    assert "tx_id/rx_id" in violations[0]


def test_validate_flags_reflectivity_out_of_bounds():
    s = default_scenario(objects=(PointScatterer(Vec3(0.5, 1.0, 0.0), 1.5),))
    violations = validate_scenario(s)
    assert len(violations) == 1
    assert "reflectivity" in violations[0]


def test_validate_flags_non_unit_direction():
    s = default_scenario()
    bad = Scenario(
        carrier=s.carrier,
        antennas=s.antennas,
        tx_id=s.tx_id,
        rx_id=s.rx_id,
        trajectory=Trajectory(Vec3(0, 0, 0), Vec3(1.0, 1.0, 0.0), 1.0, 0.01),
    )
    assert any("direction" in v for v in validate_scenario(bad))


def test_validate_flags_step_longer_than_total():
    s = default_scenario()
    bad = Scenario(
        carrier=s.carrier,
        antennas=s.antennas,
        tx_id=s.tx_id,
        rx_id=s.rx_id,
        trajectory=Trajectory(Vec3(0, 0, 0), Vec3(1, 0, 0), 0.1, 0.2),
    )
    assert any("step_length" in v for v in validate_scenario(bad))


def test_validate_flags_scatterer_on_sweep_path():
    # scatterer sits exactly on the tx sweep segment
    s = default_scenario(objects=(PointScatterer(Vec3(0.9, 0.0, 0.0), 0.2),))
    assert any("point scatterer" in v for v in validate_scenario(s))


def test_validate_flags_rx_in_tx_sweep():
    s = default_scenario()
    # tx moves towards rx and passes through it
    bad = Scenario(
        carrier=s.carrier,
        antennas=(Antenna("A", Vec3(0, 0, 0)), Antenna("B", Vec3(1.0, 0, 0))),
        tx_id="A",
        rx_id="B",
        trajectory=s.trajectory,
    )
    assert any("coincident" in v for v in validate_scenario(bad))


def test_validate_flags_negative_noise():
    s = default_scenario(noise=NoiseConfig(positioning_accuracy=-1e-5))
    assert any("positioning_accuracy" in v for v in validate_scenario(s))


def test_motion_assignment_factors():
    assert MotionAssignment.static().displacement_factor == 0.0
    assert MotionAssignment.along_t().displacement_factor == 1.0
    assert MotionAssignment.along_t_scaled(-1.0).displacement_factor == -1.0


def test_validate_flags_along_t_with_bad_factor():
    from cspa.core import MotionMode

    s = default_scenario()
    bad_ant = Antenna("C", Vec3(0.0, 5.0, 0.0), motion=MotionAssignment(MotionMode.ALONG_T, 2.0))
    bad = Scenario(
        carrier=s.carrier,
        antennas=s.antennas + (bad_ant,),
        tx_id=s.tx_id,
        rx_id=s.rx_id,
        trajectory=s.trajectory,
    )
    assert any("along_t requires factor 1" in v for v in validate_scenario(bad))


def _sample(n, t=None, moved=0.0, h=1 + 0j):
    return ChannelSample(n, float(n) if t is None else t, moved, h)


def test_trace_rejects_step_gap():
    with pytest.raises(ValueError, match="gap"):
        Trace("d", "x", (_sample(0), _sample(2)))


def test_trace_rejects_empty():
    with pytest.raises(ValueError, match="at least one"):
        Trace("d", "x", ())


def test_trace_rejects_non_increasing_time():
    with pytest.raises(ValueError, match="strictly increasing"):
        Trace("d", "x", (_sample(0, t=0.0), _sample(1, t=0.0)))


def test_trace_rejects_non_finite_h():
    with pytest.raises(ValueError, match="non-finite"):
        Trace("d", "x", (_sample(0, h=complex("nan")),))


def test_digest_is_stable_and_sensitive():
    a = default_scenario()
    b = default_scenario()
    c = default_scenario(separation=1.376)
    assert a.digest() == b.digest()
    assert a.digest() != c.digest()


def test_point_segment_distance():
    a, b = Vec3(0, 0, 0), Vec3(2, 0, 0)
    assert point_segment_distance(Vec3(1, 1, 0), a, b) == pytest.approx(1.0)
    assert point_segment_distance(Vec3(-3, 0, 0), a, b) == pytest.approx(3.0)
    assert point_segment_distance(Vec3(1, 0, 0), a, b) == 0.0


def test_vec3_arithmetic():
    v = Vec3(1.0, 2.0, 3.0) + Vec3(0.5, -2.0, 1.0)
    assert v == Vec3(1.5, 0.0, 4.0)
    assert (Vec3(3, 4, 0) - Vec3(0, 0, 0)).norm() == 5.0
    assert distance(Vec3(0, 0, 0), Vec3(0, 0, 2)) == 2.0


def test_fuzzed_valid_scenarios_simulate_cleanly():
    """Whatever validate_scenario accepts must run under every strategy."""
    import numpy as np

    from cspa.campaign import run
    from cspa.motion import Strategy

    rng = np.random.default_rng(99)
    accepted = 0
    for _ in range(60):
        sep = rng.uniform(0.5, 3.0)
        travel = rng.uniform(0.2, 2.0)
        step = travel / rng.integers(5, 40)
        objs = []
        for _ in range(rng.integers(0, 3)):
            objs.append(
                PointScatterer(
                    Vec3(rng.uniform(-2, 4), rng.uniform(0.2, 2.0), rng.uniform(-1, 1)),
                    rng.uniform(0.0, 1.0),
                )
            )
        s = Scenario(
            carrier=Carrier(rng.uniform(0.5e9, 6e9)),
            antennas=(Antenna("A", Vec3(0, 0, 0)), Antenna("B", Vec3(-sep, 0, 0))),
            tx_id="A",
            rx_id="B",
            trajectory=Trajectory(Vec3(0, 0, 0), Vec3(1, 0, 0), travel, step),
            objects=tuple(objs),
            noise=NoiseConfig(positioning_accuracy=rng.uniform(0, 1e-4)),
            dwell_time=rng.uniform(0, 0.5),
            speed=rng.uniform(0.01, 1.0),
        )
        if validate_scenario(s):
            continue
        accepted += 1
        for strategy in Strategy:
            trace = run(s, strategy, 7)
            assert all(math.isfinite(abs(x.h)) for x in trace.samples)
    assert accepted >= 40  # the generator must mostly produce valid scenarios
