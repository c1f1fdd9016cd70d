import math

import pytest

from cspa.core import (
    MotionAssignment,
    PlaneReflector,
    PointScatterer,
    Vec3,
    clutter_scenario,
    default_scenario,
    validate_scenario,
)
from cspa.model import ResidualModel, StaticChannelModel
from cspa.scenario_io import (
    ScenarioFormatError,
    model_params_text,
    parse_model_params,
    parse_scenario_text,
    render_scenario,
)

MINIMAL = """
[carrier]
frequency_hz = 2.45e9

[trajectory]
origin = 0 0 0
direction = 1 0 0
total_length_m = 0.5
step_length_m = 0.01

[antenna.A]
position = 0 0 0

[antenna.B]
position = -1.0 0 0

[run]
tx = A
rx = B
"""


def test_round_trip_default_scenario():
    s = default_scenario()
    assert parse_scenario_text(render_scenario(s)) == s


def test_round_trip_clutter_scenario():
    s = clutter_scenario()
    assert parse_scenario_text(render_scenario(s)) == s


def test_round_trip_with_objects_and_motion():
    s = default_scenario(
        objects=(
            PointScatterer(Vec3(0.2, 1.0, -0.3), 0.25, MotionAssignment.along_t()),
            PlaneReflector(
                Vec3(0, 0, -0.8), Vec3(0, 0, 1.0), 0.4, MotionAssignment.along_t_scaled(-1.5)
            ),
        )
    )
    back = parse_scenario_text(render_scenario(s))
    assert back == s


def test_minimal_scenario_defaults():
    s = parse_scenario_text(MINIMAL)
    assert s.carrier.medium_index == 1.0
    assert s.tx_id == "A" and s.rx_id == "B"
    assert s.noise.positioning_accuracy == 2.0e-5
    assert s.dwell_time == 0.2
    assert s.speed == 0.1
    assert validate_scenario(s) == []


def test_unknown_key_is_rejected():
    text = MINIMAL.replace("tx = A", "tx = A\nspeed = 2")
    with pytest.raises(ScenarioFormatError, match="unknown key"):
        parse_scenario_text(text)


def test_unknown_section_is_rejected():
    with pytest.raises(ScenarioFormatError, match="unknown section"):
        parse_scenario_text(MINIMAL + "\n[extras]\nfoo = 1\n")


def test_missing_required_section():
    text = MINIMAL.replace("[run]\ntx = A\nrx = B", "")
    with pytest.raises(ScenarioFormatError, match=r"\[run\]"):
        parse_scenario_text(text)


def test_missing_required_key():
    text = MINIMAL.replace("step_length_m = 0.01", "")
    with pytest.raises(ScenarioFormatError, match="step_length_m"):
        parse_scenario_text(text)


def test_needs_two_antennas():
    text = MINIMAL.replace("[antenna.B]\nposition = -1.0 0 0", "")
    with pytest.raises(ScenarioFormatError, match="two"):
        parse_scenario_text(text)


def test_bad_vector_value():
    text = MINIMAL.replace("origin = 0 0 0", "origin = 0 0")
    with pytest.raises(ScenarioFormatError, match="three components"):
        parse_scenario_text(text)


def test_bad_number_names_key():
    text = MINIMAL.replace("frequency_hz = 2.45e9", "frequency_hz = fast")
    with pytest.raises(ScenarioFormatError, match="frequency_hz"):
        parse_scenario_text(text)


def test_motion_parsing():
    text = MINIMAL.replace("position = -1.0 0 0", "position = -1.0 0 0\nmotion = along_t")
    s = parse_scenario_text(text)
    assert s.antenna("B").motion == MotionAssignment.along_t()
    text = MINIMAL.replace(
        "position = -1.0 0 0", "position = -1.0 0 0\nmotion = along_t_scaled:-1.0"
    )
    s = parse_scenario_text(text)
    assert s.antenna("B").motion.factor == -1.0


def test_bad_motion_token():
    text = MINIMAL.replace("position = -1.0 0 0", "position = -1.0 0 0\nmotion = sideways")
    with pytest.raises(ScenarioFormatError, match="motion"):
        parse_scenario_text(text)


def test_object_requires_known_kind():
    text = MINIMAL + "\n[object.0]\nkind = blob\nreflectivity = 0.5\nposition = 1 1 1\n"
    with pytest.raises(ScenarioFormatError, match="kind"):
        parse_scenario_text(text)


def test_comma_separated_vectors_accepted():
    text = MINIMAL.replace("origin = 0 0 0", "origin = 0, 0, 0")
    assert parse_scenario_text(text).trajectory.origin == Vec3(0, 0, 0)


def test_model_params_round_trip():
    model = StaticChannelModel(0.00676 * complex(math.cos(-0.3), math.sin(-0.3)))
    residual = ResidualModel(var_amp=0.5711, var_phase=0.0049)
    text = model_params_text(model, residual)
    back_model, back_residual = parse_model_params(text)
    assert abs(back_model.h0 - model.h0) / abs(model.h0) < 1e-12
    assert back_residual == residual


def test_model_params_text_keys():
    text = model_params_text(StaticChannelModel(0.01 + 0j), ResidualModel(0.1, 0.2))
    assert text.splitlines()[0] == "[model]"
    for key in ("h0_db", "h0_phase_rad", "var_amp_db2", "var_phase_rad2"):
        assert key in text


def test_model_params_rejects_negative_variance():
    text = (
        "[model]\nh0_db = -43.4\nh0_phase_rad = 0.0\n"
        "var_amp_db2 = -0.5\nvar_phase_rad2 = 0.0\n"
    )
    with pytest.raises(ScenarioFormatError, match="variances"):
        parse_model_params(text)


def test_model_params_rejects_missing_key():
    with pytest.raises(ScenarioFormatError, match="missing required key"):
        parse_model_params("[model]\nh0_db = -43.4\n")


def test_malformed_ini():
    with pytest.raises(ScenarioFormatError, match="malformed"):
        parse_scenario_text("not an ini file at all\n= =")
