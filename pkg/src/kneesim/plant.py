"""Deterministic simulated user + prosthesis + ground.

Kinematic template playback, not forward dynamics: per activity, a periodic
knee-angle template theta(phi) and load templates are evaluated over gait
phase phi in [0, 100)%. The knee follows its template through a first-order
response whose time constant shrinks with the commanded impedance stiffness,
so a detuned controller visibly degrades tracking. Foot placements on the
walkway, the multi-rate sensor stream, and seeded channel noise are
synthesized per placement.

Template waveforms are a synthetic calibration against target summary
measures (range of motion, peak velocity, stance load scale), not a
biomechanical model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import (
    ActivityMode,
    InsufficientDataError,
    Placement,
    PlacementConfig,
    ValidationError,
)
from .sensors import RawSensorFrame


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def other(self) -> "Side":
        return Side.LEFT if self is Side.RIGHT else Side.RIGHT


def _bump(phi: float, center: float, width: float) -> float:
    """Raised-cosine bump, peak 1 at center, support width, zero elsewhere."""
    if width <= 0:
        return 0.0
    d = phi - center
    if abs(d) >= width / 2.0:
        return 0.0
    return 0.5 * (1.0 + math.cos(2.0 * math.pi * d / width))


def _smoothstep(u: float) -> float:
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    return u * u * (3.0 - 2.0 * u)


@dataclass(frozen=True)
class GaitProfile:
    """Per-activity gait template and walkway parameters.

    The swing-flexion wave is a raised cosine of amplitude rom_deg; when
    peak_velocity_dps is set, its width is solved so the template's peak
    angular velocity at the configured cadence equals that target
    (velocity-calibrated template). Asymmetry knobs shift the sound-side
    step timing (percent of cycle) and split the stride unevenly so
    symmetry analyses have controllable ground truth.
    """

    activity: ActivityMode
    cadence_spm: float
    stride_length_m: float
    rom_deg: float
    theta_min_deg: float = 3.0
    stance_amp_deg: float = 8.0
    stance_center_pct: float = 15.0
    stance_width_pct: float = 30.0
    swing_center_pct: float = 72.0
    swing_width_pct: float = 40.0
    peak_velocity_dps: float | None = None
    stance_pct: float = 60.0
    load_peak_bw: float = 1.1
    load_valley_frac: float = 0.25
    moment_peak_nm: float = 41.0
    thigh_amp_deg: float = 20.0
    step_width_m: float = 0.12
    step_time_offset_pct: float = 0.0  # sound heel strike at (50 + offset)%
    step_length_delta_m: float = 0.0  # prosthetic step longer by +delta
    sit_load_bw: float = 0.4

    def __post_init__(self) -> None:
        if self.activity is ActivityMode.SIT_STAND:
            return
        if not self.cadence_spm > 0:
            raise ValidationError("cadence_spm must be > 0 for cyclic activities")
        if not self.stride_length_m > 0:
            raise ValidationError("stride_length_m must be > 0")
        if self.rom_deg < 0:
            raise ValidationError("rom_deg must be >= 0")
        if not 0 < self.stance_pct < 100:
            raise ValidationError("stance_pct must be in (0, 100)")
        w = self.swing_width()
        lo = self.swing_center_pct - w / 2.0
        hi = self.swing_center_pct + w / 2.0
        stance_bump_end = self.stance_center_pct + self.stance_width_pct / 2.0
        if lo < stance_bump_end or hi > 100.0:
            raise ValidationError(
                f"swing wave [{lo:.1f}, {hi:.1f}]% does not fit between the "
                f"stance wave (ends {stance_bump_end:.1f}%) and the cycle end"
            )
        if abs(self.step_time_offset_pct) >= 25.0:
            raise ValidationError("step_time_offset_pct must stay within (-25, 25)")

    @property
    def phi_rate_pct_s(self) -> float:
        """Gait-phase advance, percent of cycle per second."""
        return 100.0 * self.cadence_spm / 120.0

    @property
    def cycle_s(self) -> float:
        return 120.0 / self.cadence_spm

    @property
    def speed_mps(self) -> float:
        return self.stride_length_m * self.cadence_spm / 120.0

    def swing_width(self) -> float:
        """Swing-wave width in percent; solved from the velocity target if set."""
        if self.peak_velocity_dps is None or self.rom_deg <= 0:
            return self.swing_width_pct
        return math.pi * self.rom_deg * self.phi_rate_pct_s / self.peak_velocity_dps

    def knee_angle(self, phi: float) -> float:
        phi = phi % 100.0
        return (
            self.theta_min_deg
            + self.stance_amp_deg * _bump(phi, self.stance_center_pct, self.stance_width_pct)
            + self.rom_deg * _bump(phi, self.swing_center_pct, self.swing_width())
        )

    def load_bw(self, phi: float) -> float:
        """Vertical load as a fraction of body weight: double-hump in stance,
        zero in swing."""
        phi = phi % 100.0
        s = self.stance_pct
        if phi >= s:
            return 0.0
        rise = 0.13 * s
        fall_start = 0.83 * s
        if phi < rise:
            env = _smoothstep(phi / rise)
        elif phi > fall_start:
            env = 1.0 - _smoothstep((phi - fall_start) / (s - fall_start))
        else:
            env = 1.0
        valley = 1.0 - self.load_valley_frac * math.sin(math.pi * phi / s) ** 2
        return self.load_peak_bw * env * valley

    def moment_nm(self, phi: float) -> float:
        """Sagittal moment template at unit leverage (extension moment,
        negative through stance)."""
        phi = phi % 100.0
        s = self.stance_pct
        if phi >= s:
            return 0.0
        return -self.moment_peak_nm * math.sin(math.pi * phi / s) ** 2

    def thigh_angle(self, phi: float) -> float:
        return self.thigh_amp_deg * math.cos(2.0 * math.pi * (phi % 100.0) / 100.0)


def default_profiles() -> dict[ActivityMode, GaitProfile]:
    """Simulation defaults per activity; ranges of motion span the usual
    gamut from level walking (~30 deg) up to stair ascent (~80 deg)."""
    return {
        ActivityMode.LEVEL_WALK: GaitProfile(
            ActivityMode.LEVEL_WALK, cadence_spm=90.0, stride_length_m=1.30,
            rom_deg=30.0, stance_amp_deg=8.0),
        ActivityMode.RAMP_ASCENT: GaitProfile(
            ActivityMode.RAMP_ASCENT, cadence_spm=80.0, stride_length_m=1.10,
            rom_deg=40.0, stance_amp_deg=10.0),
        ActivityMode.RAMP_DESCENT: GaitProfile(
            ActivityMode.RAMP_DESCENT, cadence_spm=85.0, stride_length_m=1.15,
            rom_deg=45.0, stance_amp_deg=12.0),
        ActivityMode.STAIR_ASCENT: GaitProfile(
            ActivityMode.STAIR_ASCENT, cadence_spm=60.0, stride_length_m=0.60,
            rom_deg=80.0, stance_amp_deg=15.0),
        ActivityMode.STAIR_DESCENT: GaitProfile(
            ActivityMode.STAIR_DESCENT, cadence_spm=65.0, stride_length_m=0.60,
            rom_deg=70.0, stance_amp_deg=15.0),
        ActivityMode.SIT_STAND: GaitProfile(
            ActivityMode.SIT_STAND, cadence_spm=0.0, stride_length_m=0.0,
            rom_deg=0.0),
    }


@dataclass(frozen=True)
class NoiseModel:
    """Per-channel additive Gaussian noise (SD in channel units) and seed."""

    sd_theta_imu_deg: float = 0.0
    sd_q_deg: float = 0.0
    sd_f_vertical_n: float = 0.0
    sd_m_sagittal_nm: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("sd_theta_imu_deg", "sd_q_deg", "sd_f_vertical_n", "sd_m_sagittal_nm"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")


@dataclass
class Footfall:
    t_contact: float
    x: float
    y: float
    side: Side
    t_liftoff: float | None = None


@dataclass(frozen=True)
class FootfallRecord:
    t_contact: float
    t_liftoff: float
    x: float
    y: float
    side: Side


@dataclass(frozen=True)
class WalkwayRecord:
    """Ordered foot-placement events inside the walkway window."""

    footfalls: tuple[FootfallRecord, ...]
    walkway_length_m: float = 8.0


DEFAULT_LEVERAGE = {Placement.BELOW_KNEE: 1.0, Placement.ABOVE_KNEE: 0.33}

# free (zero-stiffness) tracking time constant and the stiffness that halves it
TRACK_TAU_FREE_S = 0.05
TRACK_K_REF = 0.2


@dataclass
class PlantState:
    """Mutable plant state; single-owner stepping only."""

    body_weight_n: float
    prosthetic_side: Side = Side.RIGHT
    leverage: dict[Placement, float] = field(default_factory=lambda: dict(DEFAULT_LEVERAGE))
    theta_range: tuple[float, float] = (0.0, 120.0)
    t: float = 0.0
    tick_index: int = 0
    phi_pct: float = 0.0
    theta: float = 0.0
    theta_dot: float = 0.0
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))
    # load-cell refresh accumulator and held values
    lc_acc: float = 0.0
    held_f: float = 0.0
    held_m: float = 0.0
    # walkway bookkeeping
    in_stance: dict[Side, bool] = field(default_factory=dict)
    last_x: dict[Side, float] = field(default_factory=dict)
    open_footfall: dict[Side, Footfall | None] = field(default_factory=dict)
    footfalls: list[Footfall] = field(default_factory=list)


def make_plant(
    profile: GaitProfile,
    body_weight_n: float,
    placement: PlacementConfig,
    noise: NoiseModel,
    prosthetic_side: Side = Side.RIGHT,
    leverage: dict[Placement, float] | None = None,
    theta_range: tuple[float, float] = (0.0, 120.0),
    loadcell_rate_hz: float = 100.0,
) -> tuple[PlantState, RawSensorFrame]:
    """Initialize the plant at t = 0 and synthesize the first sensor frame."""
    state = PlantState(
        body_weight_n=body_weight_n,
        prosthetic_side=prosthetic_side,
        leverage=dict(leverage) if leverage is not None else dict(DEFAULT_LEVERAGE),
        theta_range=theta_range,
        rng=np.random.default_rng(noise.seed),
        # the tick-0 frame carries a fresh load-cell sample; seed the refresh
        # accumulator so the per-second update count stays exact from tick 0
        lc_acc=loadcell_rate_hz / 2.0,
    )
    state.theta = _clamp(profile.knee_angle(0.0), theta_range) if _is_cyclic(profile) else 0.0
    pros, sound = prosthetic_side, prosthetic_side.other
    if _is_cyclic(profile):
        p_step = profile.stride_length_m / 2.0 + profile.step_length_delta_m
        state.last_x = {pros: 0.0, sound: -p_step}
        state.in_stance = {
            pros: _local_phi(state, profile, pros) < profile.stance_pct,
            sound: _local_phi(state, profile, sound) < profile.stance_pct,
        }
    else:
        state.last_x = {pros: 0.0, sound: 0.0}
        state.in_stance = {pros: True, sound: True}
    state.open_footfall = {pros: None, sound: None}
    # the prosthetic foot contacts at phi = 0; record its footfall
    if _is_cyclic(profile) and state.in_stance[pros]:
        ff = Footfall(t_contact=0.0, x=0.0, y=_side_y(profile, state, pros), side=pros)
        state.open_footfall[pros] = ff
        state.footfalls.append(ff)
    frame = _synthesize_frame(state, profile, placement, noise, loadcell_fresh=True)
    return state, frame


def _is_cyclic(profile: GaitProfile) -> bool:
    return profile.activity is not ActivityMode.SIT_STAND


def _clamp(v: float, rng: tuple[float, float]) -> float:
    return min(max(v, rng[0]), rng[1])


def _local_phi(state: PlantState, profile: GaitProfile, side: Side) -> float:
    if side is state.prosthetic_side:
        return state.phi_pct % 100.0
    return (state.phi_pct - (50.0 + profile.step_time_offset_pct)) % 100.0


def _side_y(profile: GaitProfile, state: PlantState, side: Side) -> float:
    half = profile.step_width_m / 2.0
    return -half if side is state.prosthetic_side else half


def step_plant(
    state: PlantState,
    profile: GaitProfile,
    tau_cmd: float,
    placement: PlacementConfig,
    noise: NoiseModel,
    dt: float,
    k_active: float | None = None,
    theta_eq_active: float | None = None,
    encoder_rate_hz: float = 250.0,
    loadcell_rate_hz: float = 100.0,
) -> tuple[PlantState, RawSensorFrame]:
    """Advance one tick and synthesize the sensor frame at the new time.

    Cyclic activities advance gait phase at the profile cadence and track
    the knee template; sit/stand tracks the commanded equilibrium angle.
    The first-order tracking constant is TRACK_TAU_FREE_S / (1 + k/K_REF)
    for the active stiffness k, so a stiffer commanded impedance tightens
    tracking (k_active omitted = free swing). tau_cmd itself is logged by
    the caller; it does not add energy beyond the stiffness coupling.
    """
    state.tick_index += 1
    state.t = state.tick_index * dt

    if _is_cyclic(profile):
        state.phi_pct = (state.phi_pct + dt * profile.phi_rate_pct_s) % 100.0
        target = profile.knee_angle(state.phi_pct)
    else:
        target = theta_eq_active if theta_eq_active is not None else state.theta

    k = max(k_active, 0.0) if k_active is not None else 0.0
    tau_eff = TRACK_TAU_FREE_S / (1.0 + k / TRACK_K_REF)
    alpha = min(1.0, dt / tau_eff)
    theta_prev = state.theta
    state.theta = _clamp(theta_prev + alpha * (target - theta_prev), state.theta_range)
    state.theta_dot = (state.theta - theta_prev) / dt

    if _is_cyclic(profile):
        _update_walkway(state, profile)

    # load-cell refresh: Bresenham accumulator, exactly loadcell_rate per second
    state.lc_acc += loadcell_rate_hz
    fresh = False
    if state.lc_acc >= encoder_rate_hz:
        state.lc_acc -= encoder_rate_hz
        fresh = True

    frame = _synthesize_frame(state, profile, placement, noise, loadcell_fresh=fresh)
    return state, frame


def _update_walkway(state: PlantState, profile: GaitProfile) -> None:
    p_step = profile.stride_length_m / 2.0 + profile.step_length_delta_m
    s_step = profile.stride_length_m / 2.0 - profile.step_length_delta_m
    for side in (state.prosthetic_side, state.prosthetic_side.other):
        local = _local_phi(state, profile, side)
        now_in = local < profile.stance_pct
        was_in = state.in_stance.get(side, False)
        if now_in and not was_in:
            step = p_step if side is state.prosthetic_side else s_step
            x = state.last_x[side.other] + step
            ff = Footfall(t_contact=state.t, x=x, y=_side_y(profile, state, side), side=side)
            state.footfalls.append(ff)
            state.open_footfall[side] = ff
            state.last_x[side] = x
        elif was_in and not now_in:
            open_ff = state.open_footfall.get(side)
            if open_ff is not None and open_ff.t_liftoff is None:
                open_ff.t_liftoff = state.t
            state.open_footfall[side] = None
        state.in_stance[side] = now_in


def _synthesize_frame(
    state: PlantState,
    profile: GaitProfile,
    placement: PlacementConfig,
    noise: NoiseModel,
    loadcell_fresh: bool,
) -> RawSensorFrame:
    rng = state.rng
    if _is_cyclic(profile):
        thigh_true = profile.thigh_angle(state.phi_pct)
        f_true = state.body_weight_n * profile.load_bw(state.phi_pct)
        m_true = state.leverage[placement.placement] * profile.moment_nm(state.phi_pct)
    else:
        thigh_true = -0.5 * state.theta  # hip flexes with the knee when sitting
        f_true = state.body_weight_n * profile.sit_load_bw
        m_true = 0.0
    shank_true = thigh_true + state.theta

    q = state.theta
    if noise.sd_q_deg > 0:
        q += rng.normal(0.0, noise.sd_q_deg)
    if placement.placement is Placement.BELOW_KNEE:
        theta_imu = shank_true
    else:
        theta_imu = thigh_true + 180.0
    if noise.sd_theta_imu_deg > 0:
        theta_imu += rng.normal(0.0, noise.sd_theta_imu_deg)

    if loadcell_fresh:
        f = f_true + (rng.normal(0.0, noise.sd_f_vertical_n) if noise.sd_f_vertical_n > 0 else 0.0)
        m = m_true + (rng.normal(0.0, noise.sd_m_sagittal_nm) if noise.sd_m_sagittal_nm > 0 else 0.0)
        state.held_f = f
        state.held_m = m
    else:
        f = state.held_f
        m = state.held_m

    return RawSensorFrame(
        t=state.t,
        theta_imu=theta_imu,
        q=q,
        q_dot=state.theta_dot,
        f_vertical=f,
        m_sagittal=m,
        imu_fresh=True,
        encoder_fresh=True,
        loadcell_fresh=loadcell_fresh,
    )


def forward_travel_m(state: PlantState) -> float:
    return max(state.last_x.values(), default=0.0)


def emit_walkway(
    state: PlantState,
    walkway_length_m: float = 8.0,
    trim: bool = False,
) -> WalkwayRecord:
    """Footfalls that landed inside the walkway window [0, length].

    Only completed footfalls (lift-off observed) are reported. With trim,
    the first and last retained footfalls are removed. Raises if the
    simulation did not cover the walkway's length of forward travel.
    """
    if forward_travel_m(state) < walkway_length_m:
        raise InsufficientDataError(
            f"forward travel {forward_travel_m(state):.2f} m is less than the "
            f"walkway length {walkway_length_m:.2f} m"
        )
    closed = [
        FootfallRecord(ff.t_contact, ff.t_liftoff, ff.x, ff.y, ff.side)
        for ff in state.footfalls
        if ff.t_liftoff is not None and 0.0 <= ff.x <= walkway_length_m
    ]
    closed.sort(key=lambda r: r.t_contact)
    if trim and len(closed) >= 2:
        closed = closed[1:-1]
    return WalkwayRecord(footfalls=tuple(closed), walkway_length_m=walkway_length_m)
