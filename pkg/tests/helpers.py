"""Shared test builders."""

from __future__ import annotations

from dataclasses import replace

from kneesim.config import SessionConfig, default_session_config
from kneesim.core import ActivityMode, Placement
from kneesim.plant import WalkwayRecord, FootfallRecord, Side


def make_config(
    mode: ActivityMode = ActivityMode.LEVEL_WALK,
    placement: Placement = Placement.ABOVE_KNEE,
    cadence_spm: float | None = None,
    stride_length_m: float | None = None,
    rom_deg: float | None = None,
    peak_velocity_dps: float | None = None,
    seed: int = 0,
    label: str = "test",
) -> SessionConfig:
    cfg = default_session_config(placement)
    cfg.initial_mode = mode
    cfg.seed = seed
    cfg.label = label
    overrides = {}
    if cadence_spm is not None:
        overrides["cadence_spm"] = cadence_spm
    if stride_length_m is not None:
        overrides["stride_length_m"] = stride_length_m
    if rom_deg is not None:
        overrides["rom_deg"] = rom_deg
    if peak_velocity_dps is not None:
        overrides["peak_velocity_dps"] = peak_velocity_dps
    if overrides:
        cfg.profiles[mode] = replace(cfg.profiles[mode], **overrides)
    return cfg


def speed_config(speed_mps: float, cadence_spm: float, placement: Placement, seed: int = 0) -> SessionConfig:
    """Plant tuned to hit a (speed, cadence) pair: stride = 120 * v / c."""
    return make_config(
        placement=placement,
        cadence_spm=cadence_spm,
        stride_length_m=120.0 * speed_mps / cadence_spm,
        seed=seed,
        label=f"v{speed_mps}",
    )


def synthetic_record(
    step_time_left: float = 0.6,
    step_time_right: float = 0.6,
    step_length_left: float = 0.7,
    step_length_right: float = 0.7,
    step_width: float = 0.12,
    stance_frac: float = 0.6,
    n_footfalls: int = 12,
    walkway_length_m: float = 100.0,
    first_side: Side = Side.RIGHT,
) -> WalkwayRecord:
    """Hand-built alternating walkway record with exact per-side timing.

    step_time_left / step_length_left describe the step that ENDS on the
    left foot (contralateral right -> left), and vice versa.
    """
    footfalls = []
    t = 0.0
    x = 0.0
    side = first_side
    for i in range(n_footfalls):
        y = step_width / 2.0 if side is Side.LEFT else -step_width / 2.0
        stride = step_time_left + step_time_right
        footfalls.append(FootfallRecord(
            t_contact=t, t_liftoff=t + stance_frac * stride, x=x, y=y, side=side,
        ))
        side = side.other
        dt = step_time_left if side is Side.LEFT else step_time_right
        dx = step_length_left if side is Side.LEFT else step_length_right
        t += dt
        x += dx
    return WalkwayRecord(footfalls=tuple(footfalls), walkway_length_m=walkway_length_m)
