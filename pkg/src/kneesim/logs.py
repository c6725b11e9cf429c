"""Versioned CSV schemas for sensor, state, walkway, and summary files.

Every file starts with a schema comment line, e.g.

    # schema: kneesim/sensor-log/v1 placement=above_knee participant=TF01

followed by the documented header row. Readers validate the schema token,
the placement tag, and the column order, and name the offending column on
mismatch. Times are seconds, angles degrees, forces newtons, moments
newton-meters.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import ActivityMode, GaitPhase, Placement, SchemaError
from .fsm import ControllerState, GaitEvent
from .plant import FootfallRecord, Side, WalkwayRecord
from .sensors import RawSensorFrame

SENSOR_SCHEMA = "kneesim/sensor-log/v1"
STATE_SCHEMA = "kneesim/state-log/v1"
WALKWAY_SCHEMA = "kneesim/walkway/v1"
SUMMARY_SCHEMA = "kneesim/summary/v1"

SENSOR_COLUMNS = ["t", "theta_imu", "q", "q_dot", "f_vertical", "m_sagittal", "fresh_mask"]
STATE_COLUMNS = ["t", "mode", "phase", "event", "tau_cmd", "saturated"]
WALKWAY_COLUMNS = ["t_contact", "t_liftoff", "x", "y", "side"]
SUMMARY_COLUMNS = [
    "participant", "placement", "condition", "speed_mps", "cadence_spm",
    "si_step_time", "si_step_length", "si_swing_pct", "si_stance_pct", "si_step_width",
]


def _fmt(x: float) -> str:
    # repr is the shortest string that round-trips the exact float
    return repr(float(x))


def _schema_line(schema: str, placement: Placement | None, participant: str, extra: str = "") -> str:
    line = f"# schema: {schema}"
    if placement is not None:
        line += f" placement={placement.value}"
    if participant:
        line += f" participant={participant}"
    if extra:
        line += f" {extra}"
    return line


def _parse_schema_line(line: str, expected: str, path: str) -> dict[str, str]:
    if not line.startswith("# schema: "):
        raise SchemaError(f"{path}: missing '# schema:' header line")
    parts = line[len("# schema: "):].strip().split()
    if not parts or parts[0] != expected:
        raise SchemaError(f"{path}: expected schema {expected}, got {parts[0] if parts else '<none>'}")
    tokens: dict[str, str] = {}
    for part in parts[1:]:
        if "=" in part:
            key, value = part.split("=", 1)
            tokens[key] = value
    return tokens


def _check_header(header: Sequence[str], expected: Sequence[str], path: str) -> None:
    if list(header) != list(expected):
        for got, want in zip(list(header) + ["<missing>"] * len(expected), expected):
            if got != want:
                raise SchemaError(f"{path}: expected column '{want}', got '{got}'")
        raise SchemaError(f"{path}: extra columns beyond {list(expected)}")


def _parse_float(row: dict[str, str], column: str, path: str, line_no: int) -> float:
    try:
        return float(row[column])
    except (KeyError, ValueError):
        raise SchemaError(
            f"{path}:{line_no}: column '{column}' is not a number: {row.get(column)!r}"
        ) from None


@dataclass
class SensorLog:
    """Columnar sensor log; arrays share one length."""

    t: np.ndarray
    theta_imu: np.ndarray
    q: np.ndarray
    q_dot: np.ndarray
    f_vertical: np.ndarray
    m_sagittal: np.ndarray
    fresh_mask: np.ndarray
    placement: Placement
    participant_id: str = ""

    def __len__(self) -> int:
        return int(self.t.size)

    @classmethod
    def from_frames(
        cls, frames: Iterable[RawSensorFrame], placement: Placement, participant_id: str = ""
    ) -> "SensorLog":
        rows = list(frames)
        return cls(
            t=np.array([f.t for f in rows], dtype=float),
            theta_imu=np.array([f.theta_imu for f in rows], dtype=float),
            q=np.array([f.q for f in rows], dtype=float),
            q_dot=np.array([f.q_dot for f in rows], dtype=float),
            f_vertical=np.array([f.f_vertical for f in rows], dtype=float),
            m_sagittal=np.array([f.m_sagittal for f in rows], dtype=float),
            fresh_mask=np.array([f.fresh_mask for f in rows], dtype=int),
            placement=placement,
            participant_id=participant_id,
        )

    def frames(self) -> list[RawSensorFrame]:
        out = []
        for i in range(len(self)):
            imu_f, enc_f, lc_f = RawSensorFrame.fresh_flags(int(self.fresh_mask[i]))
            out.append(RawSensorFrame(
                t=float(self.t[i]),
                theta_imu=float(self.theta_imu[i]),
                q=float(self.q[i]),
                q_dot=float(self.q_dot[i]),
                f_vertical=float(self.f_vertical[i]),
                m_sagittal=float(self.m_sagittal[i]),
                imu_fresh=imu_f,
                encoder_fresh=enc_f,
                loadcell_fresh=lc_f,
            ))
        return out


def write_sensor_csv(path: str | Path, log: SensorLog) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(_schema_line(SENSOR_SCHEMA, log.placement, log.participant_id) + "\n")
        writer = csv.writer(fh)
        writer.writerow(SENSOR_COLUMNS)
        for i in range(len(log)):
            writer.writerow([
                _fmt(log.t[i]), _fmt(log.theta_imu[i]), _fmt(log.q[i]), _fmt(log.q_dot[i]),
                _fmt(log.f_vertical[i]), _fmt(log.m_sagittal[i]), str(int(log.fresh_mask[i])),
            ])


def read_sensor_csv(path: str | Path) -> SensorLog:
    path = str(path)
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        tokens = _parse_schema_line(first, SENSOR_SCHEMA, path)
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames or [], SENSOR_COLUMNS, path)
        cols: dict[str, list[float]] = {c: [] for c in SENSOR_COLUMNS}
        for line_no, row in enumerate(reader, start=3):
            for c in SENSOR_COLUMNS:
                cols[c].append(_parse_float(row, c, path, line_no))
    placement = _placement_from_tokens(tokens, path)
    return SensorLog(
        t=np.array(cols["t"]),
        theta_imu=np.array(cols["theta_imu"]),
        q=np.array(cols["q"]),
        q_dot=np.array(cols["q_dot"]),
        f_vertical=np.array(cols["f_vertical"]),
        m_sagittal=np.array(cols["m_sagittal"]),
        fresh_mask=np.array([int(v) for v in cols["fresh_mask"]], dtype=int),
        placement=placement,
        participant_id=tokens.get("participant", ""),
    )


def _placement_from_tokens(tokens: dict[str, str], path: str) -> Placement:
    raw = tokens.get("placement")
    try:
        return Placement(raw)
    except ValueError:
        raise SchemaError(f"{path}: missing or unknown placement token {raw!r}") from None


@dataclass
class StateLog:
    """Columnar controller-state log."""

    t: np.ndarray
    mode: list[str]
    phase: list[str]
    event: list[str]  # "" when no event that tick
    tau_cmd: np.ndarray
    saturated: np.ndarray
    placement: Placement
    participant_id: str = ""

    def __len__(self) -> int:
        return int(self.t.size)

    @classmethod
    def from_states(
        cls,
        times: Sequence[float],
        states: Sequence[ControllerState],
        placement: Placement,
        participant_id: str = "",
    ) -> "StateLog":
        return cls(
            t=np.asarray(times, dtype=float),
            mode=[s.mode.value for s in states],
            phase=[s.phase.value for s in states],
            event=[s.last_event.value if s.last_event else "" for s in states],
            tau_cmd=np.array([s.tau_cmd for s in states], dtype=float),
            saturated=np.array([s.saturated for s in states], dtype=bool),
            placement=placement,
            participant_id=participant_id,
        )

    def heel_strike_times(self) -> np.ndarray:
        """Cycle delimiters: heel strikes, including ones relabeled as mode
        switches into EarlyStance."""
        hits = [
            self.t[i]
            for i in range(len(self))
            if self.event[i] == GaitEvent.HEEL_STRIKE.value
            or (self.event[i] == GaitEvent.MODE_SWITCH.value
                and self.phase[i] == GaitPhase.EARLY_STANCE.value)
        ]
        return np.asarray(hits, dtype=float)

    def stance_mask(self) -> np.ndarray:
        stance = {GaitPhase.EARLY_STANCE.value, GaitPhase.LATE_STANCE.value}
        return np.array([p in stance for p in self.phase], dtype=bool)


def write_state_csv(path: str | Path, log: StateLog) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(_schema_line(STATE_SCHEMA, log.placement, log.participant_id) + "\n")
        writer = csv.writer(fh)
        writer.writerow(STATE_COLUMNS)
        for i in range(len(log)):
            writer.writerow([
                _fmt(log.t[i]), log.mode[i], log.phase[i], log.event[i],
                _fmt(log.tau_cmd[i]), "1" if log.saturated[i] else "0",
            ])


def read_state_csv(path: str | Path) -> StateLog:
    path = str(path)
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        tokens = _parse_schema_line(first, STATE_SCHEMA, path)
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames or [], STATE_COLUMNS, path)
        t, mode, phase, event, tau, sat = [], [], [], [], [], []
        valid_modes = {m.value for m in ActivityMode}
        valid_phases = {p.value for p in GaitPhase}
        for line_no, row in enumerate(reader, start=3):
            t.append(_parse_float(row, "t", path, line_no))
            if row["mode"] not in valid_modes:
                raise SchemaError(f"{path}:{line_no}: column 'mode' has unknown value {row['mode']!r}")
            if row["phase"] not in valid_phases:
                raise SchemaError(f"{path}:{line_no}: column 'phase' has unknown value {row['phase']!r}")
            mode.append(row["mode"])
            phase.append(row["phase"])
            event.append(row["event"])
            tau.append(_parse_float(row, "tau_cmd", path, line_no))
            sat.append(row["saturated"] == "1")
    return StateLog(
        t=np.asarray(t), mode=mode, phase=phase, event=event,
        tau_cmd=np.asarray(tau), saturated=np.asarray(sat, dtype=bool),
        placement=_placement_from_tokens(tokens, path),
        participant_id=tokens.get("participant", ""),
    )


def write_walkway_csv(
    path: str | Path,
    record: WalkwayRecord,
    placement: Placement,
    participant_id: str = "",
) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(_schema_line(
            WALKWAY_SCHEMA, placement, participant_id,
            extra=f"length_m={_fmt(record.walkway_length_m)}",
        ) + "\n")
        writer = csv.writer(fh)
        writer.writerow(WALKWAY_COLUMNS)
        for ff in record.footfalls:
            writer.writerow([
                _fmt(ff.t_contact), _fmt(ff.t_liftoff), _fmt(ff.x), _fmt(ff.y), ff.side.value,
            ])


def read_walkway_csv(path: str | Path) -> tuple[WalkwayRecord, Placement, str]:
    path = str(path)
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        tokens = _parse_schema_line(first, WALKWAY_SCHEMA, path)
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames or [], WALKWAY_COLUMNS, path)
        footfalls = []
        for line_no, row in enumerate(reader, start=3):
            try:
                side = Side(row["side"])
            except ValueError:
                raise SchemaError(
                    f"{path}:{line_no}: column 'side' has unknown value {row['side']!r}"
                ) from None
            footfalls.append(FootfallRecord(
                t_contact=_parse_float(row, "t_contact", path, line_no),
                t_liftoff=_parse_float(row, "t_liftoff", path, line_no),
                x=_parse_float(row, "x", path, line_no),
                y=_parse_float(row, "y", path, line_no),
                side=side,
            ))
    length = float(tokens.get("length_m", "8"))
    placement = _placement_from_tokens(tokens, path)
    return (
        WalkwayRecord(footfalls=tuple(footfalls), walkway_length_m=length),
        placement,
        tokens.get("participant", ""),
    )


def summary_csv_text(rows: Sequence[dict[str, object]]) -> str:
    """Render summary rows (one per participant/placement/condition) as the
    documented summary CSV."""
    buf = io.StringIO()
    buf.write(f"# schema: {SUMMARY_SCHEMA}\n")
    writer = csv.writer(buf)
    writer.writerow(SUMMARY_COLUMNS)
    for row in rows:
        writer.writerow([
            row["participant"], row["placement"], row["condition"],
            *(_fmt(float(row[c])) if not (isinstance(row[c], float) and math.isnan(row[c])) else ""
              for c in SUMMARY_COLUMNS[3:]),
        ])
    return buf.getvalue()


def write_summary_csv(path: str | Path, rows: Sequence[dict[str, object]]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(summary_csv_text(rows))
