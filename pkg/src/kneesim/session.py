"""Closed-loop runner: plant <-> state machine <-> impedance law.

One owner steps the loop on the fixed encoder grid. Operator events
(activity requests) come from a time-stamped script or, in live sessions,
from the network intake queue drained before each tick. Output artifacts
are the sensor log, the state log, and the walkway record, all
deterministic under (config, script, seed).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .config import SessionConfig
from .core import ActivityMode, ConfigError, GaitPhase, InsufficientDataError
from .fsm import ControllerState, initial_state, request_mode, tick
from .impedance import ImpedanceParams, ParamTable
from .logs import SensorLog, StateLog
from .plant import WalkwayRecord, emit_walkway, make_plant, step_plant
from .sensors import RawSensorFrame, segment_angles


@dataclass(frozen=True)
class ScriptEvent:
    t: float
    mode: ActivityMode


def parse_script(text: str, source: str = "<script>") -> list[ScriptEvent]:
    """Parse a key-fob event script: lines of `t, request_mode, <mode>`."""
    events: list[ScriptEvent] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3 or parts[1] != "request_mode":
            raise ConfigError(
                f"{source}:{line_no}: expected 't, request_mode, <mode>', got {raw!r}"
            )
        try:
            t = float(parts[0])
        except ValueError:
            raise ConfigError(f"{source}:{line_no}: bad timestamp {parts[0]!r}") from None
        try:
            mode = ActivityMode(parts[2])
        except ValueError:
            valid = ", ".join(m.value for m in ActivityMode)
            raise ConfigError(
                f"{source}:{line_no}: unknown mode {parts[2]!r} (valid: {valid})"
            ) from None
        events.append(ScriptEvent(t=t, mode=mode))
    events.sort(key=lambda e: e.t)
    return events


def load_script(path: str | Path) -> list[ScriptEvent]:
    path = Path(path)
    return parse_script(path.read_text(), source=str(path))


@dataclass
class SessionResult:
    sensor_log: SensorLog
    state_log: StateLog
    walkway: WalkwayRecord


@dataclass(frozen=True)
class TickRecord:
    t: float
    ctrl: ControllerState
    frame: RawSensorFrame


class SessionRunner:
    """Steps the closed loop; also the live session's single control owner."""

    def __init__(
        self,
        config: SessionConfig,
        script: list[ScriptEvent] | None = None,
        seed: int | None = None,
    ):
        self.config = config
        self.table: ParamTable = config.table.copy()
        self.rules = config.build_rules()
        self.script = sorted(script or [], key=lambda e: e.t)
        self._script_idx = 0
        noise = config.noise_with_seed(seed)
        self.noise = noise
        self.dt = config.device.dt
        self.ctrl = initial_state(config.initial_mode)
        self.plant, self._frame = make_plant(
            profile=config.profiles[config.initial_mode],
            body_weight_n=config.participant.body_weight_n,
            placement=config.placement,
            noise=noise,
            prosthetic_side=config.prosthetic_side,
            leverage=config.leverage,
            theta_range=(config.device.theta_min_deg, config.device.theta_max_deg),
            loadcell_rate_hz=config.device.loadcell_rate_hz,
        )
        self._frames: list[RawSensorFrame] = []
        self._times: list[float] = []
        self._states: list[ControllerState] = []
        self.tick_count = 0

    @property
    def t(self) -> float:
        """Time of the frame the next tick will consume."""
        return self._frame.t

    def request_mode(self, mode: ActivityMode) -> None:
        self.ctrl = request_mode(self.ctrl, mode)

    def apply_param_update(
        self, mode: ActivityMode, phase: GaitPhase, params: ImpedanceParams
    ) -> None:
        """Live tuning entry point; applied between ticks by construction."""
        self.table.update_cell(mode, phase, params)

    def tick_once(self) -> TickRecord:
        frame = self._frame
        while self._script_idx < len(self.script) and self.script[self._script_idx].t <= frame.t:
            self.request_mode(self.script[self._script_idx].mode)
            self._script_idx += 1

        angles = segment_angles(frame, self.config.placement)
        self.ctrl, _tau = tick(
            self.ctrl, frame, angles, self.table, self.rules, self.config.device
        )
        self._frames.append(frame)
        self._times.append(frame.t)
        self._states.append(self.ctrl)
        self.tick_count += 1

        active = self.ctrl.active_params
        profile = self.config.profiles[self.ctrl.mode]
        self.plant, self._frame = step_plant(
            self.plant,
            profile,
            self.ctrl.tau_cmd,
            self.config.placement,
            self.noise,
            self.dt,
            k_active=active.k if active else None,
            theta_eq_active=active.theta_eq if active else None,
            encoder_rate_hz=self.config.device.encoder_rate_hz,
            loadcell_rate_hz=self.config.device.loadcell_rate_hz,
        )
        return TickRecord(t=frame.t, ctrl=self.ctrl, frame=frame)

    def run(self, duration_s: float) -> SessionResult:
        n_ticks = max(int(round(duration_s / self.dt)), 0)
        for _ in range(n_ticks):
            self.tick_once()
        return self.result()

    def result(self) -> SessionResult:
        placement = self.config.placement.placement
        pid = self.config.participant.id
        sensor_log = SensorLog.from_frames(self._frames, placement, pid)
        state_log = StateLog.from_states(self._times, self._states, placement, pid)
        try:
            walkway = emit_walkway(self.plant, self.config.walkway_length_m, trim=False)
        except InsufficientDataError:
            walkway = WalkwayRecord(footfalls=(), walkway_length_m=self.config.walkway_length_m)
        return SessionResult(sensor_log=sensor_log, state_log=state_log, walkway=walkway)


def scripted_session(
    config: SessionConfig,
    script: list[ScriptEvent] | None = None,
    duration_s: float = 60.0,
    seed: int | None = None,
) -> SessionResult:
    """Run a full scripted closed-loop session.

    Returns the sensor log, state log, and walkway record; byte-identical
    outputs for identical (config, script, seed). A run too short to cover
    the walkway yields an empty walkway record rather than an error.
    """
    return SessionRunner(config, script=script, seed=seed).run(duration_s)
