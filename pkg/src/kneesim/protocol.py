"""Wire messages for the live session service.

One JSON object per WebSocket text message. Client commands carry a
sequence number and are answered by exactly one ack or error echoing it;
the server additionally streams decimated telemetry and sends a full
config snapshot on connect.

Kinds: telemetry, param_update, mode_request, ack, error, snapshot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .core import ActivityMode, GaitPhase, ProtocolError
from .fsm import ControllerState
from .sensors import RawSensorFrame

KIND_TELEMETRY = "telemetry"
KIND_PARAM_UPDATE = "param_update"
KIND_MODE_REQUEST = "mode_request"
KIND_ACK = "ack"
KIND_ERROR = "error"
KIND_SNAPSHOT = "snapshot"


class CommandError(ProtocolError):
    """Malformed client command; carries the sequence number when known."""

    def __init__(self, reason: str, seq: int | None = None):
        super().__init__(reason)
        self.seq = seq


@dataclass(frozen=True)
class ParamUpdateCmd:
    seq: int
    mode: ActivityMode
    phase: GaitPhase
    k: float
    b: float
    theta_eq: float


@dataclass(frozen=True)
class ModeRequestCmd:
    seq: int
    mode: ActivityMode


Command = ParamUpdateCmd | ModeRequestCmd


def encode(message: dict[str, Any]) -> str:
    return json.dumps(message, separators=(",", ":"), sort_keys=True)


def make_telemetry(t: float, ctrl: ControllerState, frame: RawSensorFrame) -> dict[str, Any]:
    active = ctrl.active_params
    return {
        "kind": KIND_TELEMETRY,
        "t": t,
        "payload": {
            "mode": ctrl.mode.value,
            "phase": ctrl.phase.value,
            "event": ctrl.last_event.value if ctrl.last_event else "",
            "theta": frame.q,
            "theta_dot": frame.q_dot,
            "f_vertical": frame.f_vertical,
            "m_sagittal": frame.m_sagittal,
            "tau_cmd": ctrl.tau_cmd,
            "saturated": ctrl.saturated,
            "active_params": {
                "k": active.k if active else None,
                "b": active.b if active else None,
                "theta_eq": active.theta_eq if active else None,
            },
        },
    }


def make_snapshot(t: float, config_dict: dict[str, Any], ctrl: ControllerState) -> dict[str, Any]:
    return {
        "kind": KIND_SNAPSHOT,
        "t": t,
        "payload": {
            "config": config_dict,
            "state": {"mode": ctrl.mode.value, "phase": ctrl.phase.value},
        },
    }


def make_ack(seq: int, t: float, payload: dict[str, Any] | None = None) -> dict[str, Any]:
    return {"kind": KIND_ACK, "seq": seq, "t": t, "payload": payload or {}}


def make_error(seq: int | None, t: float, reason: str) -> dict[str, Any]:
    return {"kind": KIND_ERROR, "seq": seq, "t": t, "payload": {"reason": reason}}


def _require_number(payload: dict[str, Any], key: str, seq: int | None) -> float:
    value = payload.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CommandError(f"payload field '{key}' must be a number, got {value!r}", seq)
    return float(value)


def _require_enum(payload: dict[str, Any], key: str, enum_cls: type, seq: int | None) -> Any:
    value = payload.get(key)
    try:
        return enum_cls(value)
    except ValueError:
        valid = ", ".join(e.value for e in enum_cls)
        raise CommandError(
            f"payload field '{key}' must be one of [{valid}], got {value!r}", seq
        ) from None


def parse_command(text: str | bytes) -> Command:
    """Decode and validate a client command; raises CommandError with the
    request's sequence number when it can be recovered."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError:
            raise CommandError("message is not valid UTF-8") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CommandError(f"message is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise CommandError("message must be a JSON object")

    seq = data.get("seq")
    if isinstance(seq, bool) or not isinstance(seq, int):
        raise CommandError(f"'seq' must be an integer, got {seq!r}",
                           seq if isinstance(seq, int) else None)

    kind = data.get("kind")
    payload = data.get("payload")
    if not isinstance(payload, dict):
        raise CommandError("'payload' must be an object", seq)

    if kind == KIND_PARAM_UPDATE:
        return ParamUpdateCmd(
            seq=seq,
            mode=_require_enum(payload, "activity", ActivityMode, seq),
            phase=_require_enum(payload, "phase", GaitPhase, seq),
            k=_require_number(payload, "k", seq),
            b=_require_number(payload, "b", seq),
            theta_eq=_require_number(payload, "theta_eq", seq),
        )
    if kind == KIND_MODE_REQUEST:
        return ModeRequestCmd(seq=seq, mode=_require_enum(payload, "mode", ActivityMode, seq))
    raise CommandError(f"unknown message kind {kind!r}", seq)
