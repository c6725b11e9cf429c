from __future__ import annotations

import pytest

from kneesim.core import (
    DeviceSpec,
    ImuMount,
    LoadcellSite,
    ParticipantProfile,
    Placement,
    PlacementConfig,
    ValidationError,
    wrap_deg,
)


def test_placement_fully_determines_mount_and_site():
    above = PlacementConfig(Placement.ABOVE_KNEE)
    below = PlacementConfig(Placement.BELOW_KNEE)
    assert above.imu_mount is ImuMount.THIGH_FIXED
    assert above.loadcell_site is LoadcellSite.SOCKET_SIDE
    assert below.imu_mount is ImuMount.SHANK_FIXED
    assert below.loadcell_site is LoadcellSite.GROUND_SIDE


def test_placement_consistency_is_structural():
    # derived properties leave no way to build an inconsistent triple
    for placement in Placement:
        cfg = PlacementConfig(placement)
        above = placement is Placement.ABOVE_KNEE
        assert (cfg.imu_mount is ImuMount.THIGH_FIXED) == above
        assert (cfg.loadcell_site is LoadcellSite.SOCKET_SIDE) == above


def test_device_spec_defaults():
    spec = DeviceSpec()
    assert spec.torque_limit_nm == 100.0
    assert spec.loadcell_rate_hz == 100.0
    assert spec.encoder_rate_hz == 250.0
    assert spec.dt == pytest.approx(0.004)


@pytest.mark.parametrize("kwargs", [
    dict(torque_limit_nm=0.0),
    dict(torque_limit_nm=-5.0),
    dict(encoder_rate_hz=0.0),
    dict(loadcell_rate_hz=-1.0),
    dict(encoder_rate_hz=50.0),  # below the load-cell rate
    dict(theta_min_deg=10.0, theta_max_deg=10.0),
])
def test_device_spec_rejects_bad_values(kwargs):
    with pytest.raises(ValidationError):
        DeviceSpec(**kwargs)


@pytest.mark.parametrize("kwargs", [
    dict(body_mass_kg=0.0),
    dict(body_mass_kg=-10.0),
    dict(height_cm=0.0),
])
def test_participant_rejects_bad_values(kwargs):
    with pytest.raises(ValidationError):
        ParticipantProfile(**kwargs)


def test_participant_body_weight():
    p = ParticipantProfile(body_mass_kg=100.0)
    assert p.body_weight_n == pytest.approx(980.665)


@pytest.mark.parametrize("angle,expected", [
    (0.0, 0.0),
    (180.0, 180.0),
    (180.5, -179.5),
    (-180.0, 180.0),
    (365.0, 5.0),
    (-190.0, 170.0),
    (540.0, 180.0),
])
def test_wrap_deg(angle, expected):
    assert wrap_deg(angle) == pytest.approx(expected, abs=1e-12)
