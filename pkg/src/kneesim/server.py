"""Live session service: the closed loop plus streaming telemetry and
command intake over WebSocket.

One control-loop owner thread steps the simulation (real time or
time-scaled); network commands land in an intake queue drained at tick
boundaries, so parameter updates are atomic between ticks. Telemetry is
decimated (default 25 Hz of simulated time) and fanned out through bounded
drop-oldest queues: a slow or disconnecting consumer never perturbs the
loop, and the on-disk logs stay authoritative.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from time import perf_counter, sleep
from typing import Any

from websockets.sync.server import ServerConnection, serve

from .config import SessionConfig, to_dict
from .core import KneesimError
from .impedance import ImpedanceParams
from .protocol import (
    Command,
    CommandError,
    ModeRequestCmd,
    ParamUpdateCmd,
    encode,
    make_ack,
    make_error,
    make_snapshot,
    make_telemetry,
    parse_command,
)
from .session import ScriptEvent, SessionRunner, SessionResult

TELEMETRY_MAXLEN = 256


@dataclass(eq=False)
class _Client:
    conn: ServerConnection
    cond: threading.Condition = field(default_factory=threading.Condition)
    replies: deque = field(default_factory=deque)
    telemetry: deque = field(default_factory=lambda: deque(maxlen=TELEMETRY_MAXLEN))
    ready: bool = False  # snapshot enqueued; telemetry may flow
    closed: bool = False

    def push_reply(self, message: dict[str, Any]) -> None:
        with self.cond:
            self.replies.append(message)
            self.cond.notify()

    def push_telemetry(self, message: dict[str, Any]) -> None:
        with self.cond:
            if self.ready:
                self.telemetry.append(message)  # deque drops oldest when full
                self.cond.notify()

    def close(self) -> None:
        with self.cond:
            self.closed = True
            self.cond.notify()


class _Snapshot:
    """Intake marker: produce a snapshot for this client at a tick boundary."""

    def __init__(self, client: _Client):
        self.client = client


class LiveSession:
    """Runs `serve`: closed loop + telemetry/command service."""

    def __init__(
        self,
        config: SessionConfig,
        script: list[ScriptEvent] | None = None,
        seed: int | None = None,
        time_scale: float = 1.0,
        duration_s: float | None = None,
        telemetry_hz: float = 25.0,
    ):
        self.config = config
        self.runner = SessionRunner(config, script=script, seed=seed)
        self.time_scale = time_scale
        self.duration_s = duration_s
        self.decimation = max(int(round(config.device.encoder_rate_hz / telemetry_hz)), 1)
        self._config_dict = to_dict(config)
        self._intake: deque = deque()
        self._intake_lock = threading.Lock()
        self._clients: set[_Client] = set()
        self._clients_lock = threading.Lock()
        self._stop = threading.Event()
        self.result: SessionResult | None = None

    # ---- network side -------------------------------------------------

    def _register(self, conn: ServerConnection) -> _Client:
        client = _Client(conn=conn)
        with self._clients_lock:
            self._clients.add(client)
        with self._intake_lock:
            self._intake.append((client, _Snapshot(client)))
        return client

    def _unregister(self, client: _Client) -> None:
        client.close()
        with self._clients_lock:
            self._clients.discard(client)

    def _writer(self, client: _Client) -> None:
        while True:
            with client.cond:
                while not (client.closed or client.replies or client.telemetry):
                    client.cond.wait(timeout=0.5)
                if client.closed and not client.replies and not client.telemetry:
                    return
                batch = list(client.replies)
                client.replies.clear()
                batch.extend(client.telemetry)
                client.telemetry.clear()
            try:
                for message in batch:
                    client.conn.send(encode(message))
            except Exception:
                self._unregister(client)
                return

    def _handler(self, conn: ServerConnection) -> None:
        client = self._register(conn)
        writer = threading.Thread(target=self._writer, args=(client,), daemon=True)
        writer.start()
        try:
            for raw in conn:
                try:
                    cmd = parse_command(raw)
                except CommandError as exc:
                    client.push_reply(make_error(exc.seq, self.runner.t, str(exc)))
                    continue
                with self._intake_lock:
                    self._intake.append((client, cmd))
        except Exception:
            pass
        finally:
            self._unregister(client)

    # ---- control side --------------------------------------------------

    def _apply(self, client: _Client, cmd: Command | _Snapshot, t: float) -> None:
        if isinstance(cmd, _Snapshot):
            client.push_reply(make_snapshot(t, self._config_dict, self.runner.ctrl))
            with client.cond:
                client.ready = True
            return
        try:
            if isinstance(cmd, ParamUpdateCmd):
                params = ImpedanceParams(k=cmd.k, b=cmd.b, theta_eq=cmd.theta_eq)
                self.runner.apply_param_update(cmd.mode, cmd.phase, params)
                client.push_reply(make_ack(cmd.seq, t, {
                    "activity": cmd.mode.value, "phase": cmd.phase.value,
                    "k": params.k, "b": params.b, "theta_eq": params.theta_eq,
                }))
            elif isinstance(cmd, ModeRequestCmd):
                self.runner.request_mode(cmd.mode)
                client.push_reply(make_ack(cmd.seq, t, {"mode": cmd.mode.value}))
        except KneesimError as exc:
            client.push_reply(make_error(cmd.seq, t, str(exc)))

    def _drain_intake(self) -> None:
        with self._intake_lock:
            pending = list(self._intake)
            self._intake.clear()
        t = self.runner.t
        for client, cmd in pending:
            self._apply(client, cmd, t)

    def _broadcast_telemetry(self, message: dict[str, Any]) -> None:
        with self._clients_lock:
            clients = list(self._clients)
        for client in clients:
            client.push_telemetry(message)

    def control_loop(self) -> None:
        dt = self.runner.dt
        n_ticks = None if self.duration_s is None else max(int(round(self.duration_s / dt)), 0)
        next_wall = perf_counter()
        while not self._stop.is_set():
            if n_ticks is not None and self.runner.tick_count >= n_ticks:
                break
            self._drain_intake()
            rec = self.runner.tick_once()
            if self.runner.tick_count % self.decimation == 0:
                self._broadcast_telemetry(make_telemetry(rec.t, rec.ctrl, rec.frame))
            if self.time_scale > 0:
                next_wall += dt / self.time_scale
                lag = next_wall - perf_counter()
                if lag > 0:
                    sleep(lag)
                elif lag < -1.0:
                    next_wall = perf_counter()  # fell far behind; don't sprint
        self.result = self.runner.result()

    def stop(self) -> None:
        self._stop.set()

    def run(self, host: str = "127.0.0.1", port: int = 8765, out_dir: str | Path | None = None,
            ready: threading.Event | None = None) -> SessionResult:
        """Serve until the configured duration elapses (or stop() is called),
        then write logs like `simulate` when out_dir is given."""
        with serve(self._handler, host, port) as server:
            server_thread = threading.Thread(target=server.serve_forever, daemon=True)
            server_thread.start()
            if ready is not None:
                ready.set()
            try:
                self.control_loop()
            finally:
                with self._clients_lock:
                    clients = list(self._clients)
                for client in clients:
                    client.close()
                server.shutdown()
        assert self.result is not None
        if out_dir is not None:
            from .cli import write_session_outputs

            write_session_outputs(self.result, self.config, Path(out_dir))
        return self.result
