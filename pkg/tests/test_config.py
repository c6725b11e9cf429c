from __future__ import annotations

from pathlib import Path

import pytest

from kneesim.config import (
    default_session_config,
    dumps_config,
    load_config,
    loads_config,
    save_config,
)
from kneesim.core import (
    ActivityMode,
    ConfigError,
    GaitPhase,
    Placement,
    ValidationError,
)


def test_default_round_trip(tmp_path):
    cfg = default_session_config()
    path = tmp_path / "session.yaml"
    save_config(cfg, path)
    again = load_config(path)
    assert again == cfg
    # and a second hop stays stable
    assert dumps_config(again) == dumps_config(cfg)


def test_above_knee_derives_socket_side_loadcell():
    cfg = loads_config("placement: above_knee\n")
    assert cfg.placement.loadcell_site.value == "socket_side"
    cfg = loads_config("placement: below_knee\n")
    assert cfg.placement.loadcell_site.value == "ground_side"


def test_zero_torque_limit_rejected():
    with pytest.raises(ValidationError) as err:
        loads_config("device:\n  torque_limit_nm: 0\n")
    assert "torque_limit" in str(err.value)


def test_unknown_enum_value_named():
    with pytest.raises(ConfigError) as err:
        loads_config("placement: sideways\n")
    assert "placement" in str(err.value) and "sideways" in str(err.value)


def test_yaml_parse_error_carries_location():
    with pytest.raises(ConfigError) as err:
        loads_config("device: [unclosed\n  torque: 3\n", source="broken.yaml")
    assert "broken.yaml" in str(err.value)


def test_wrong_type_named_field():
    with pytest.raises(ConfigError) as err:
        loads_config("participant:\n  body_mass_kg: heavy\n")
    assert "participant.body_mass_kg" in str(err.value)


def test_partial_impedance_cells_rejected():
    text = """
impedance:
  cells:
    level_walk:
      early_stance: {k: 1.0, b: 0.0, theta_eq: 5.0}
"""
    with pytest.raises(ConfigError) as err:
        loads_config(text)
    assert "level_walk" in str(err.value)


def test_tunable_subset_parsed():
    cfg = default_session_config()
    text = dumps_config(cfg).replace(
        "tunable: all",
        "tunable:\n  - level_walk/early_stance\n  - level_walk/late_stance",
    )
    parsed = loads_config(text)
    assert len(parsed.table.tunable) == 2
    assert (ActivityMode.LEVEL_WALK, GaitPhase.EARLY_STANCE) in parsed.table.tunable


def test_theta_eq_outside_device_range_rejected():
    cfg = default_session_config()
    text = dumps_config(cfg).replace("theta_max_deg: 120.0", "theta_max_deg: 60.0")
    with pytest.raises(ValidationError) as err:
        loads_config(text)
    assert "theta_eq" in str(err.value)


def test_profile_overrides_apply():
    text = """
profiles:
  level_walk:
    cadence_spm: 87.6
    stride_length_m: 1.5548
    rom_deg: 75.8
    peak_velocity_dps: 345.0
"""
    cfg = loads_config(text)
    prof = cfg.profiles[ActivityMode.LEVEL_WALK]
    assert prof.cadence_spm == 87.6
    assert prof.peak_velocity_dps == 345.0
    assert cfg.profiles[ActivityMode.STAIR_ASCENT].rom_deg == 80.0  # untouched default


def test_invalid_threshold_order_rejected():
    text = """
fsm:
  thresholds:
    above_knee: {heel_strike_bw: 0.05, toe_off_bw: 0.10}
"""
    with pytest.raises(ValidationError):
        loads_config(text)


def test_placement_thresholds_are_separate_blocks():
    text = """
fsm:
  thresholds:
    above_knee: {heel_strike_bw: 0.25, toe_off_bw: 0.12}
    below_knee: {heel_strike_bw: 0.18, toe_off_bw: 0.08}
"""
    cfg = loads_config(text)
    assert cfg.fsm.thresholds[Placement.ABOVE_KNEE].heel_strike_bw == 0.25
    assert cfg.fsm.thresholds[Placement.BELOW_KNEE].heel_strike_bw == 0.18


def test_committed_configs_stay_in_sync_with_code_defaults():
    configs = Path(__file__).parent.parent / "configs"
    assert load_config(configs / "above_knee.yaml") == default_session_config(Placement.ABOVE_KNEE)
    assert load_config(configs / "below_knee.yaml") == default_session_config(Placement.BELOW_KNEE)
    # the remaining shipped configs must at least load cleanly
    load_config(configs / "self_selected_above_knee.yaml")
    load_config(configs / "asymmetric_gait.yaml")


def test_build_rules_uses_active_placement_thresholds():
    text = """
placement: below_knee
fsm:
  thresholds:
    above_knee: {heel_strike_bw: 0.25, toe_off_bw: 0.12}
    below_knee: {heel_strike_bw: 0.18, toe_off_bw: 0.08}
"""
    cfg = loads_config(text)
    rules = cfg.build_rules()
    from kneesim.fsm import GuardSignal

    hs_rule = rules.rules[GaitPhase.SWING_EXTENSION][0]
    assert hs_rule.signal is GuardSignal.LOAD_BW
    assert hs_rule.threshold == 0.18
