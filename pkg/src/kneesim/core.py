"""Shared domain types and unit conventions.

Units throughout the package: degrees and deg/s for joint angles and
velocities (0 deg = full knee extension, flexion positive), Nm for torque,
N for force, kg for mass, cm for height, seconds for time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

GRAVITY_MPS2 = 9.80665


class KneesimError(Exception):
    """Base class for all package errors."""


class ConfigError(KneesimError):
    """Config file failed to parse or references unknown keys/values."""


class ValidationError(ConfigError):
    """A constructed object violates one of its invariants."""


class FrameError(KneesimError):
    """A sensor frame was rejected (non-finite or malformed channel)."""


class RateError(KneesimError):
    """Incompatible sample rates for resampling."""


class RuleSetError(KneesimError):
    """A transition rule-set failed validation; message lists violations."""


class MissingCellError(KneesimError):
    """Parameter table has no entry for the requested (activity, phase)."""


class InsufficientDataError(KneesimError):
    """Not enough steps / cycles / travel to compute the requested output."""


class SchemaError(KneesimError):
    """A log file does not match its documented CSV schema."""


class PlacementMismatchError(KneesimError):
    """Refused to combine placement-tagged data across placements."""


class AnalysisDomainError(KneesimError):
    """Analysis input outside the measure's domain (e.g. SI of two zeros)."""


class ProtocolError(KneesimError):
    """Malformed or out-of-contract wire message."""


class Placement(Enum):
    ABOVE_KNEE = "above_knee"
    BELOW_KNEE = "below_knee"


class ImuMount(Enum):
    THIGH_FIXED = "thigh_fixed"
    SHANK_FIXED = "shank_fixed"


class LoadcellSite(Enum):
    SOCKET_SIDE = "socket_side"
    GROUND_SIDE = "ground_side"


@dataclass(frozen=True)
class PlacementConfig:
    """Powertrain placement and everything that semantically follows from it.

    The IMU mount and load-cell site are derived properties, so an
    inconsistent (placement, mount, site) triple cannot be constructed.
    """

    placement: Placement

    @property
    def imu_mount(self) -> ImuMount:
        if self.placement is Placement.ABOVE_KNEE:
            return ImuMount.THIGH_FIXED
        return ImuMount.SHANK_FIXED

    @property
    def loadcell_site(self) -> LoadcellSite:
        if self.placement is Placement.ABOVE_KNEE:
            return LoadcellSite.SOCKET_SIDE
        return LoadcellSite.GROUND_SIDE


class ActivityMode(Enum):
    LEVEL_WALK = "level_walk"
    RAMP_ASCENT = "ramp_ascent"
    RAMP_DESCENT = "ramp_descent"
    STAIR_ASCENT = "stair_ascent"
    STAIR_DESCENT = "stair_descent"
    SIT_STAND = "sit_stand"


CYCLIC_MODES = (
    ActivityMode.LEVEL_WALK,
    ActivityMode.RAMP_ASCENT,
    ActivityMode.RAMP_DESCENT,
    ActivityMode.STAIR_ASCENT,
    ActivityMode.STAIR_DESCENT,
)


class GaitPhase(Enum):
    # cyclic ambulation phases, traversed in this order
    EARLY_STANCE = "early_stance"
    LATE_STANCE = "late_stance"
    SWING_FLEXION = "swing_flexion"
    SWING_EXTENSION = "swing_extension"
    # sit/stand phases
    SEATED = "seated"
    RISING = "rising"
    STANDING = "standing"
    LOWERING = "lowering"


CYCLIC_PHASES = (
    GaitPhase.EARLY_STANCE,
    GaitPhase.LATE_STANCE,
    GaitPhase.SWING_FLEXION,
    GaitPhase.SWING_EXTENSION,
)

SITSTAND_PHASES = (
    GaitPhase.SEATED,
    GaitPhase.RISING,
    GaitPhase.STANDING,
    GaitPhase.LOWERING,
)


def phases_for_mode(mode: ActivityMode) -> tuple[GaitPhase, ...]:
    return SITSTAND_PHASES if mode is ActivityMode.SIT_STAND else CYCLIC_PHASES


@dataclass(frozen=True)
class DeviceSpec:
    """Actuation and sensing limits of the powered knee.

    The control loop runs on the encoder grid (dt = 1/encoder_rate). The
    load cell refreshes fewer times per second than the encoder; the refresh
    schedule spreads loadcell_rate updates evenly over encoder_rate ticks
    (for the 250/100 default that is the alternating 2-3-2-3 tick pattern),
    so strict divisibility is not required.
    """

    torque_limit_nm: float = 100.0
    loadcell_rate_hz: float = 100.0
    encoder_rate_hz: float = 250.0
    imu_rate_hz: float = 250.0
    device_mass_kg: float = 1.8  # metadata only
    theta_min_deg: float = 0.0
    theta_max_deg: float = 120.0

    def __post_init__(self) -> None:
        if not self.torque_limit_nm > 0:
            raise ValidationError("torque_limit_nm must be > 0")
        for name in ("loadcell_rate_hz", "encoder_rate_hz", "imu_rate_hz"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be > 0")
        if self.encoder_rate_hz < self.loadcell_rate_hz:
            raise ValidationError("encoder_rate_hz must be >= loadcell_rate_hz")
        if not self.theta_max_deg > self.theta_min_deg:
            raise ValidationError("theta_max_deg must exceed theta_min_deg")

    @property
    def dt(self) -> float:
        return 1.0 / self.encoder_rate_hz


@dataclass(frozen=True)
class JointState:
    """Knee state snapshot: angle (deg), velocity (deg/s), commanded torque (Nm).

    Angles stay within the device's mechanical range; the plant clamps and
    the parameter validators enforce it for equilibrium angles.
    """

    theta: float
    theta_dot: float
    tau_cmd: float = 0.0


@dataclass(frozen=True)
class ParticipantProfile:
    body_mass_kg: float = 85.0
    height_cm: float = 180.0
    id: str = "demo"

    def __post_init__(self) -> None:
        if not self.body_mass_kg > 0:
            raise ValidationError("body_mass_kg must be > 0")
        if not self.height_cm > 0:
            raise ValidationError("height_cm must be > 0")

    @property
    def body_weight_n(self) -> float:
        return self.body_mass_kg * GRAVITY_MPS2


def require_finite(value: float, name: str) -> float:
    if not math.isfinite(value):
        raise FrameError(f"non-finite {name}: {value!r}")
    return value


def wrap_deg(angle: float) -> float:
    """Wrap an angle in degrees to the half-open interval (-180, 180]."""
    r = angle % 360.0
    if r > 180.0:
        r -= 360.0
    return r
