from __future__ import annotations

import numpy as np
import pytest

from helpers import make_config, synthetic_record
from kneesim.core import Placement, SchemaError
from kneesim.logs import (
    SENSOR_COLUMNS,
    read_sensor_csv,
    read_state_csv,
    read_walkway_csv,
    write_sensor_csv,
    write_state_csv,
    write_walkway_csv,
    summary_csv_text,
)
from kneesim.session import scripted_session


@pytest.fixture(scope="module")
def session_result():
    return scripted_session(make_config(seed=5), duration_s=10.0)


def test_sensor_csv_round_trip(tmp_path, session_result):
    path = tmp_path / "sensor.csv"
    write_sensor_csv(path, session_result.sensor_log)
    back = read_sensor_csv(path)
    orig = session_result.sensor_log
    assert back.placement is orig.placement
    assert back.participant_id == orig.participant_id
    for col in ("t", "theta_imu", "q", "q_dot", "f_vertical", "m_sagittal"):
        np.testing.assert_allclose(getattr(back, col), getattr(orig, col), rtol=1e-9)
    assert np.array_equal(back.fresh_mask, orig.fresh_mask)


def test_sensor_csv_schema_line(tmp_path, session_result):
    path = tmp_path / "sensor.csv"
    write_sensor_csv(path, session_result.sensor_log)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# schema: kneesim/sensor-log/v1")
    assert "placement=above_knee" in lines[0]
    assert lines[1] == ",".join(SENSOR_COLUMNS)


def test_state_csv_round_trip(tmp_path, session_result):
    path = tmp_path / "state.csv"
    write_state_csv(path, session_result.state_log)
    back = read_state_csv(path)
    orig = session_result.state_log
    assert back.mode == orig.mode
    assert back.phase == orig.phase
    assert back.event == orig.event
    np.testing.assert_allclose(back.tau_cmd, orig.tau_cmd, rtol=1e-9)
    assert np.array_equal(back.saturated, orig.saturated)
    np.testing.assert_array_equal(back.heel_strike_times(), orig.heel_strike_times())


def test_walkway_csv_round_trip(tmp_path):
    record = synthetic_record(n_footfalls=10, walkway_length_m=8.0)
    path = tmp_path / "walkway.csv"
    write_walkway_csv(path, record, Placement.BELOW_KNEE, "TF01")
    back, placement, participant = read_walkway_csv(path)
    assert placement is Placement.BELOW_KNEE
    assert participant == "TF01"
    assert back.walkway_length_m == record.walkway_length_m
    assert back.footfalls == record.footfalls


def test_missing_schema_line_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,q\n0,1\n")
    with pytest.raises(SchemaError) as err:
        read_sensor_csv(path)
    assert "schema" in str(err.value)


def test_wrong_schema_kind_rejected(tmp_path, session_result):
    path = tmp_path / "sensor.csv"
    write_sensor_csv(path, session_result.sensor_log)
    with pytest.raises(SchemaError):
        read_state_csv(path)


def test_column_mismatch_names_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        "# schema: kneesim/sensor-log/v1 placement=above_knee\n"
        "t,theta_imu,q,qdot_wrong,f_vertical,m_sagittal,fresh_mask\n"
    )
    with pytest.raises(SchemaError) as err:
        read_sensor_csv(path)
    assert "q_dot" in str(err.value)


def test_bad_value_names_column_and_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        "# schema: kneesim/sensor-log/v1 placement=above_knee\n"
        "t,theta_imu,q,q_dot,f_vertical,m_sagittal,fresh_mask\n"
        "0.0,1.0,not_a_number,0,0,0,7\n"
    )
    with pytest.raises(SchemaError) as err:
        read_sensor_csv(path)
    msg = str(err.value)
    assert "'q'" in msg and ":3" in msg


def test_missing_placement_token_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        "# schema: kneesim/sensor-log/v1\n"
        "t,theta_imu,q,q_dot,f_vertical,m_sagittal,fresh_mask\n"
    )
    with pytest.raises(SchemaError) as err:
        read_sensor_csv(path)
    assert "placement" in str(err.value)


def test_summary_csv_layout():
    text = summary_csv_text([{
        "participant": "TF01", "placement": "above_knee", "condition": "self_selected",
        "speed_mps": 1.135, "cadence_spm": 87.6, "si_step_time": 0.95,
        "si_step_length": 0.96, "si_swing_pct": 0.97, "si_stance_pct": 0.98,
        "si_step_width": 0.99,
    }])
    lines = text.splitlines()
    assert lines[0] == "# schema: kneesim/summary/v1"
    assert lines[1].split(",") == [
        "participant", "placement", "condition", "speed_mps", "cadence_spm",
        "si_step_time", "si_step_length", "si_swing_pct", "si_stance_pct", "si_step_width",
    ]
    assert lines[2].startswith("TF01,above_knee,self_selected,1.135,87.6")
