"""Sensor geometry: raw frames, segment-angle remapping, load-cell semantics.

The IMU rides on the powertrain body, so what it measures depends on where
the powertrain sits relative to the knee center:

  below-knee:  theta_shank = theta_imu          theta_thigh = theta_shank - q
  above-knee:  theta_thigh = theta_imu - 180    theta_shank = theta_thigh + q

with q the joint encoder reading. The IMU zero reference is assumed
gravity-aligned (shank angle 0 in quiet standing).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

from .core import (
    FrameError,
    Placement,
    PlacementConfig,
    RateError,
    require_finite,
    wrap_deg,
)

FRESH_IMU = 1
FRESH_ENCODER = 2
FRESH_LOADCELL = 4


@dataclass(frozen=True)
class RawSensorFrame:
    """One multi-rate sensor snapshot on the controller tick grid.

    Channels flagged stale hold the last fresh value (zero-order hold);
    within a stream, t strictly increases.
    """

    t: float
    theta_imu: float  # sagittal IMU angle, deg
    q: float  # joint encoder, deg
    q_dot: float  # joint velocity, deg/s
    f_vertical: float  # load-cell vertical force, N
    m_sagittal: float  # load-cell sagittal moment, Nm
    imu_fresh: bool = True
    encoder_fresh: bool = True
    loadcell_fresh: bool = True

    @property
    def fresh_mask(self) -> int:
        mask = 0
        if self.imu_fresh:
            mask |= FRESH_IMU
        if self.encoder_fresh:
            mask |= FRESH_ENCODER
        if self.loadcell_fresh:
            mask |= FRESH_LOADCELL
        return mask

    @staticmethod
    def fresh_flags(mask: int) -> tuple[bool, bool, bool]:
        return bool(mask & FRESH_IMU), bool(mask & FRESH_ENCODER), bool(mask & FRESH_LOADCELL)


@dataclass(frozen=True)
class SegmentAngles:
    """Shank and thigh sagittal angles in degrees.

    Satisfies theta_thigh == theta_shank - q (to 1e-9 deg) for the frame it
    was derived from, under either placement.
    """

    theta_shank: float
    theta_thigh: float


def segment_angles(frame: RawSensorFrame, placement: PlacementConfig) -> SegmentAngles:
    """Recover segment angles from the IMU and encoder under a placement.

    The IMU-derived angle is unwrapped to (-180, 180]; the chained angle is
    computed directly from it so the shank/thigh/encoder identity holds
    exactly.
    """
    require_finite(frame.theta_imu, "theta_imu")
    require_finite(frame.q, "q")
    if placement.placement is Placement.BELOW_KNEE:
        shank = wrap_deg(frame.theta_imu)
        thigh = shank - frame.q
    else:
        thigh = wrap_deg(frame.theta_imu - 180.0)
        shank = thigh + frame.q
    return SegmentAngles(theta_shank=shank, theta_thigh=thigh)


class LoadcellMeasures(Enum):
    GROUND_REACTION = "ground_reaction"
    SOCKET_INTERFACE = "socket_interface"


class MomentLeverage(Enum):
    LONG = "long"
    SHORT = "short"


@dataclass(frozen=True)
class LoadcellSemantics:
    measures: LoadcellMeasures
    stance_moment_leverage: MomentLeverage


def loadcell_semantics(placement: PlacementConfig) -> LoadcellSemantics:
    """What the load cell physically measures under a placement.

    Below the knee it sees prosthesis-to-ground forces through the long
    stance lever arm; above the knee it sees knee-to-socket interface forces
    through a short one. Stance sagittal moments are therefore not
    comparable across placements.
    """
    if placement.placement is Placement.BELOW_KNEE:
        return LoadcellSemantics(LoadcellMeasures.GROUND_REACTION, MomentLeverage.LONG)
    return LoadcellSemantics(LoadcellMeasures.SOCKET_INTERFACE, MomentLeverage.SHORT)


def resample(
    frames: Sequence[RawSensorFrame],
    target_rate_hz: float,
    source_rate_hz: float | None = None,
) -> list[RawSensorFrame]:
    """Zero-order-hold resample onto the exact target time grid.

    The target rate must equal the source rate or divide it evenly. Every
    output value is the value of the latest input frame at or before the
    grid time; output timestamps are t0 + j/target_rate exactly.
    """
    frames = list(frames)
    if not frames:
        return []
    if source_rate_hz is None:
        if len(frames) < 2:
            raise RateError("cannot infer source rate from fewer than 2 frames")
        dt = frames[1].t - frames[0].t
        if dt <= 0:
            raise FrameError("frame timestamps must strictly increase")
        source_rate_hz = 1.0 / dt
    if target_rate_hz <= 0:
        raise RateError("target rate must be > 0")
    ratio = source_rate_hz / target_rate_hz
    if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
        raise RateError(
            f"target rate {target_rate_hz} Hz must equal or divide "
            f"source rate {source_rate_hz} Hz"
        )

    t0 = frames[0].t
    span = frames[-1].t - t0
    n_out = int(span * target_rate_hz + 1e-9) + 1
    out: list[RawSensorFrame] = []
    src = 0
    for j in range(n_out):
        tj = t0 + j / target_rate_hz
        while src + 1 < len(frames) and frames[src + 1].t <= tj + 1e-9:
            src += 1
        out.append(replace(frames[src], t=tj))
    return out


def synth_imu_reading(theta_shank: float, theta_thigh: float, placement: PlacementConfig) -> float:
    """IMU value a given physical pose would produce under a placement."""
    if placement.placement is Placement.BELOW_KNEE:
        return theta_shank
    return theta_thigh + 180.0


def iter_loadcell_fresh(encoder_rate_hz: float, loadcell_rate_hz: float) -> Iterable[bool]:
    """Infinite per-tick load-cell refresh schedule.

    Bresenham-style accumulator: exactly loadcell_rate updates per
    encoder_rate ticks, spread as evenly as integer ticks allow (2-3-2-3
    alternation for the 250/100 default). Deterministic; tick 0 is fresh.
    """
    # seed so tick 0 is fresh without inflating the first-second count
    acc = encoder_rate_hz - loadcell_rate_hz / 2.0
    while True:
        acc += loadcell_rate_hz
        if acc >= encoder_rate_hz:
            acc -= encoder_rate_hz
            yield True
        else:
            yield False
