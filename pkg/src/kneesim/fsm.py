"""Activity selection and gait-phase state machine.

Three levels: the operator picks the activity (key fob / console button /
scripted event), this state machine walks the gait phases off the load-cell
vertical force and the joint kinematics, and each (activity, phase) cell
selects the impedance parameters that produce the commanded torque.

Cyclic modes traverse EarlyStance -> LateStance -> SwingFlexion ->
SwingExtension; sit/stand cycles Seated -> Rising -> Standing -> Lowering.
Every transition rule is a Schmitt trigger (threshold + band) gated by a
minimum dwell time in the current phase. Activity switches are latched and
applied only at the safe boundary: EarlyStance entry for cyclic modes, the
Standing phase for sit/stand (full weight bearing in both cases).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping

from .core import (
    ActivityMode,
    CYCLIC_PHASES,
    DeviceSpec,
    GaitPhase,
    JointState,
    SITSTAND_PHASES,
    ValidationError,
    phases_for_mode,
)
from .impedance import ImpedanceParams, ParamTable, impedance_torque, saturate
from .sensors import RawSensorFrame, SegmentAngles


class GaitEvent(Enum):
    HEEL_STRIKE = "heel_strike"
    TOE_OFF = "toe_off"
    PHASE_ADVANCE = "phase_advance"
    MODE_SWITCH = "mode_switch"


class GuardSignal(Enum):
    LOAD_BW = "load_bw"  # vertical force / body weight
    THETA = "theta"  # knee angle, deg
    THETA_DOT = "theta_dot"  # knee velocity, deg/s
    THIGH_ANGLE = "thigh_angle"  # deg
    TIME_IN_PHASE = "time_in_phase"  # s


class Direction(Enum):
    RISING = "rising"
    FALLING = "falling"


@dataclass(frozen=True)
class TransitionRule:
    """Schmitt-trigger exit rule: arm on the far side of the band, fire on
    crossing the threshold, never before dwell_s in the phase."""

    signal: GuardSignal
    direction: Direction
    threshold: float
    target: GaitPhase
    event: GaitEvent
    band: float = 0.0
    dwell_s: float = 0.06

    def arm_ready(self, value: float) -> bool:
        # time-in-phase is monotone from zero; hysteresis is meaningless there
        if self.signal is GuardSignal.TIME_IN_PHASE:
            return True
        if self.direction is Direction.RISING:
            return value <= self.threshold - self.band
        return value >= self.threshold + self.band

    def fires(self, value: float) -> bool:
        if self.direction is Direction.RISING:
            return value >= self.threshold
        return value <= self.threshold


@dataclass(frozen=True)
class SitStandTiming:
    seated_angle_deg: float = 90.0
    standing_angle_deg: float = 0.0
    ramp_s: float = 2.0
    seated_hold_s: float = 2.0
    standing_hold_s: float = 3.0


@dataclass(frozen=True)
class GaitRules:
    """Rule table plus the context guards evaluate against."""

    rules: Mapping[GaitPhase, tuple[TransitionRule, ...]]
    body_weight_n: float
    sit_stand: SitStandTiming = SitStandTiming()


def validate_rules(rules: GaitRules) -> list[str]:
    """Return named violations; an empty list means the rule-set is usable."""
    problems: list[str] = []
    if not rules.body_weight_n > 0:
        problems.append("body_weight_n must be > 0")
    for phase in CYCLIC_PHASES + SITSTAND_PHASES:
        exits = rules.rules.get(phase, ())
        if not exits:
            problems.append(f"phase {phase.value} has no exit rule")
        for i, rule in enumerate(exits):
            where = f"{phase.value}[{i}]"
            if not rule.dwell_s > 0:
                problems.append(f"{where}: dwell must be > 0")
            if rule.band < 0:
                problems.append(f"{where}: band must be >= 0 (non-inverted)")
            same_family = (phase in CYCLIC_PHASES) == (rule.target in CYCLIC_PHASES)
            if not same_family:
                problems.append(f"{where}: target {rule.target.value} crosses phase families")
    # stance detection band must not invert: heel-strike load threshold above toe-off
    hs = [r for r in rules.rules.get(GaitPhase.SWING_EXTENSION, ()) if r.signal is GuardSignal.LOAD_BW]
    to = [r for r in rules.rules.get(GaitPhase.LATE_STANCE, ()) if r.signal is GuardSignal.LOAD_BW]
    if hs and to and hs[0].threshold <= to[0].threshold:
        problems.append(
            "heel-strike load threshold must exceed toe-off load threshold "
            f"({hs[0].threshold} <= {to[0].threshold})"
        )
    return problems


def build_rules(
    body_weight_n: float,
    heel_strike_bw: float = 0.20,
    toe_off_bw: float = 0.10,
    dwell_s: float = 0.06,
    sit_stand: SitStandTiming = SitStandTiming(),
) -> GaitRules:
    """Default rule-set.

    Heel strike: load rising through heel_strike_bw * BW. Toe off: load
    falling through toe_off_bw * BW. Mid-stance and mid-swing advance on the
    knee-velocity zero crossing (stance-flexion peak, swing-flexion peak)
    with generous time-in-phase fallbacks so an unusual trajectory cannot
    wedge the machine.
    """
    band_bw = 0.05
    vel_band = 2.0

    def time_rule(threshold: float, target: GaitPhase) -> TransitionRule:
        return TransitionRule(
            GuardSignal.TIME_IN_PHASE, Direction.RISING, threshold,
            target, GaitEvent.PHASE_ADVANCE, band=0.0, dwell_s=dwell_s,
        )

    ss = sit_stand
    rules: dict[GaitPhase, tuple[TransitionRule, ...]] = {
        GaitPhase.EARLY_STANCE: (
            TransitionRule(GuardSignal.THETA_DOT, Direction.FALLING, 0.0,
                           GaitPhase.LATE_STANCE, GaitEvent.PHASE_ADVANCE,
                           band=vel_band, dwell_s=dwell_s),
            time_rule(0.60, GaitPhase.LATE_STANCE),
        ),
        GaitPhase.LATE_STANCE: (
            TransitionRule(GuardSignal.LOAD_BW, Direction.FALLING, toe_off_bw,
                           GaitPhase.SWING_FLEXION, GaitEvent.TOE_OFF,
                           band=band_bw, dwell_s=dwell_s),
        ),
        GaitPhase.SWING_FLEXION: (
            TransitionRule(GuardSignal.THETA_DOT, Direction.FALLING, 0.0,
                           GaitPhase.SWING_EXTENSION, GaitEvent.PHASE_ADVANCE,
                           band=vel_band, dwell_s=dwell_s),
            time_rule(0.50, GaitPhase.SWING_EXTENSION),
        ),
        GaitPhase.SWING_EXTENSION: (
            TransitionRule(GuardSignal.LOAD_BW, Direction.RISING, heel_strike_bw,
                           GaitPhase.EARLY_STANCE, GaitEvent.HEEL_STRIKE,
                           band=band_bw, dwell_s=dwell_s),
        ),
        GaitPhase.SEATED: (time_rule(ss.seated_hold_s, GaitPhase.RISING),),
        GaitPhase.RISING: (
            TransitionRule(GuardSignal.THETA, Direction.FALLING,
                           ss.standing_angle_deg + 5.0, GaitPhase.STANDING,
                           GaitEvent.PHASE_ADVANCE, band=2.0, dwell_s=dwell_s),
            time_rule(ss.ramp_s + 1.0, GaitPhase.STANDING),
        ),
        GaitPhase.STANDING: (time_rule(ss.standing_hold_s, GaitPhase.LOWERING),),
        GaitPhase.LOWERING: (
            TransitionRule(GuardSignal.THETA, Direction.RISING,
                           ss.seated_angle_deg - 5.0, GaitPhase.SEATED,
                           GaitEvent.PHASE_ADVANCE, band=2.0, dwell_s=dwell_s),
            time_rule(ss.ramp_s + 1.0, GaitPhase.SEATED),
        ),
    }
    built = GaitRules(rules=rules, body_weight_n=body_weight_n, sit_stand=ss)
    problems = validate_rules(built)
    if problems:
        raise ValidationError("invalid rule-set: " + "; ".join(problems))
    return built


@dataclass(frozen=True)
class ControllerState:
    """Controller snapshot after a tick. Immutable; tick() returns a new one."""

    mode: ActivityMode
    phase: GaitPhase
    time_in_phase: float
    tau_cmd: float = 0.0
    saturated: bool = False
    last_event: GaitEvent | None = None
    pending_mode: ActivityMode | None = None
    armed: tuple[bool, ...] = ()
    active_params: ImpedanceParams | None = None


def initial_state(mode: ActivityMode) -> ControllerState:
    """Start mid-swing with dwell pre-satisfied so the first weight
    acceptance registers immediately; sit/stand starts a fresh Standing
    hold."""
    if mode is ActivityMode.SIT_STAND:
        return ControllerState(mode=mode, phase=GaitPhase.STANDING, time_in_phase=0.0)
    return ControllerState(mode=mode, phase=GaitPhase.SWING_EXTENSION, time_in_phase=10.0)


def request_mode(ctrl: ControllerState, mode: ActivityMode) -> ControllerState:
    """Latch a pending activity switch; applied at the next safe boundary.

    Requesting the current mode is a no-op; a second request before the
    boundary overwrites the first (single pending slot).
    """
    if mode is ctrl.mode and ctrl.pending_mode is None:
        return ctrl
    if mode is ctrl.mode:
        return replace(ctrl, pending_mode=None)
    return replace(ctrl, pending_mode=mode)


def _signal_value(
    sig: GuardSignal,
    ctrl: ControllerState,
    frame: RawSensorFrame,
    angles: SegmentAngles,
    body_weight_n: float,
) -> float:
    if sig is GuardSignal.LOAD_BW:
        return frame.f_vertical / body_weight_n
    if sig is GuardSignal.THETA:
        return frame.q
    if sig is GuardSignal.THETA_DOT:
        return frame.q_dot
    if sig is GuardSignal.THIGH_ANGLE:
        return angles.theta_thigh
    return ctrl.time_in_phase


def _effective_params(
    table: ParamTable,
    mode: ActivityMode,
    phase: GaitPhase,
    time_in_phase: float,
    ss: SitStandTiming,
) -> ImpedanceParams:
    params = table.lookup(mode, phase)
    if mode is not ActivityMode.SIT_STAND:
        return params
    if phase is GaitPhase.RISING:
        start, end = ss.seated_angle_deg, ss.standing_angle_deg
    elif phase is GaitPhase.LOWERING:
        start, end = ss.standing_angle_deg, ss.seated_angle_deg
    else:
        return params
    frac = min(time_in_phase / ss.ramp_s, 1.0) if ss.ramp_s > 0 else 1.0
    return ImpedanceParams(k=params.k, b=params.b, theta_eq=start + (end - start) * frac)


def tick(
    ctrl: ControllerState,
    frame: RawSensorFrame,
    angles: SegmentAngles,
    table: ParamTable,
    rules: GaitRules,
    spec: DeviceSpec,
) -> tuple[ControllerState, float]:
    """One 4 ms control step: at most one phase transition, then the torque.

    Priority order: exit rules of the current phase are evaluated in table
    order and the first one that fires wins. A pending mode request is
    applied when the fired transition enters EarlyStance (cyclic safe
    boundary) or, for sit/stand, while Standing with dwell satisfied; the
    tick is then labeled MODE_SWITCH. The torque is
    lookup -> impedance -> saturation for the (mode, phase) after any
    transition.
    """
    exits = rules.rules.get(ctrl.phase, ())
    armed = list(ctrl.armed) if len(ctrl.armed) == len(exits) else [False] * len(exits)

    mode = ctrl.mode
    phase = ctrl.phase
    time_in_phase = ctrl.time_in_phase
    pending = ctrl.pending_mode
    event: GaitEvent | None = None
    transitioned = False

    for i, rule in enumerate(exits):
        value = _signal_value(rule.signal, ctrl, frame, angles, rules.body_weight_n)
        if not armed[i] and rule.arm_ready(value):
            armed[i] = True
        if armed[i] and time_in_phase >= rule.dwell_s and rule.fires(value):
            phase = rule.target
            event = rule.event
            transitioned = True
            break

    if transitioned:
        time_in_phase = 0.0
        if pending is not None and phase is GaitPhase.EARLY_STANCE:
            mode = pending
            pending = None
            event = GaitEvent.MODE_SWITCH
            if mode is ActivityMode.SIT_STAND:
                phase = GaitPhase.STANDING
    elif (
        pending is not None
        and mode is ActivityMode.SIT_STAND
        and phase is GaitPhase.STANDING
        and time_in_phase >= _min_dwell(exits)
    ):
        mode = pending
        pending = None
        event = GaitEvent.MODE_SWITCH
        phase = GaitPhase.STANDING if mode is ActivityMode.SIT_STAND else GaitPhase.EARLY_STANCE
        time_in_phase = 0.0
        transitioned = True
    else:
        time_in_phase += spec.dt

    if transitioned:
        armed = [False] * len(rules.rules.get(phase, ()))
    if pending is not None and pending is mode:
        pending = None

    params = _effective_params(table, mode, phase, time_in_phase, rules.sit_stand)
    raw_tau = impedance_torque(JointState(theta=frame.q, theta_dot=frame.q_dot), params)
    tau, sat = saturate(raw_tau, spec)

    new_ctrl = ControllerState(
        mode=mode,
        phase=phase,
        time_in_phase=time_in_phase,
        tau_cmd=tau,
        saturated=sat,
        last_event=event,
        pending_mode=pending,
        armed=tuple(armed),
        active_params=params,
    )
    return new_ctrl, tau


def _min_dwell(exits: tuple[TransitionRule, ...]) -> float:
    return min((r.dwell_s for r in exits), default=0.06)
