// Console session: connection lifecycle, pending-request bookkeeping, and
// the confirmed-parameter discipline.
//
// Displayed parameter values only ever come from the last snapshot or from
// server acks; local edits stay drafts until acknowledged. The session is
// transport-agnostic so tests can drive it with a fake transport and the
// browser build injects a WebSocket-backed one.

import { TelemetryBuffer } from "./buffer.js";
import {
  type Activity,
  type ImpedanceCell,
  type ParamLimits,
  type Phase,
  type ServerMessage,
  type SnapshotPayload,
  ProtocolFormatError,
  cellKey,
  makeModeRequest,
  makeParamUpdate,
  parseServerMessage,
  phasesFor,
  validateCell,
} from "./protocol.js";

export interface Transport {
  send(text: string): void;
  close(): void;
}

export interface TransportHandlers {
  onopen: () => void;
  onmessage: (text: string) => void;
  onclose: () => void;
}

export type TransportFactory = (url: string, handlers: TransportHandlers) => Transport;

export type ConnectionState = "disconnected" | "connecting" | "awaiting_snapshot" | "ready";

export type SessionEvent =
  | "state"
  | "snapshot"
  | "telemetry"
  | "params"
  | "protocol-error";

interface Pending {
  kind: "param_update" | "mode_request";
  detail: string; // cell key or mode
  resolve: (msg: ServerMessage) => void;
  reject: (err: Error) => void;
}

export class RequestRejected extends Error {
  constructor(public readonly reason: string) {
    super(reason);
  }
}

export class ConsoleSession {
  readonly buffer: TelemetryBuffer;
  state: ConnectionState = "disconnected";
  snapshot: SnapshotPayload | null = null;
  /** last server-confirmed (snapshot or ack) parameters per cell */
  readonly confirmedParams = new Map<string, ImpedanceCell>();
  tunable: Set<string> | "all" = "all";
  limits: ParamLimits = { thetaMin: 0, thetaMax: 120 };
  currentMode: Activity | null = null;
  currentPhase: Phase | null = null;
  protocolErrors = 0;

  private transport: Transport | null = null;
  private nextSeq = 1;
  private readonly pending = new Map<number, Pending>();
  private readonly listeners = new Map<SessionEvent, Set<() => void>>();
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly transportFactory: TransportFactory,
    options: { windowS?: number; retryMs?: number } = {},
  ) {
    this.buffer = new TelemetryBuffer(options.windowS ?? 10.0);
    this.retryMs = options.retryMs ?? 2000;
  }

  private readonly retryMs: number;

  on(event: SessionEvent, listener: () => void): () => void {
    if (!this.listeners.has(event)) this.listeners.set(event, new Set());
    this.listeners.get(event)!.add(listener);
    return () => this.listeners.get(event)!.delete(listener);
  }

  private emit(event: SessionEvent): void {
    for (const listener of this.listeners.get(event) ?? []) listener();
  }

  connect(): void {
    if (this.transport !== null) return;
    this.closed = false;
    this.setState("connecting");
    this.transport = this.transportFactory(this.url, {
      onopen: () => {
        // fresh connection: stale telemetry must never mix with the new run
        this.buffer.clear();
        this.setState("awaiting_snapshot");
      },
      onmessage: (text) => this.handleMessage(text),
      onclose: () => this.handleClose(),
    });
  }

  close(): void {
    this.closed = true;
    if (this.retryTimer !== null) clearTimeout(this.retryTimer);
    this.retryTimer = null;
    this.transport?.close();
    this.transport = null;
    this.setState("disconnected");
  }

  private setState(state: ConnectionState): void {
    if (this.state !== state) {
      this.state = state;
      this.emit("state");
    }
  }

  private handleClose(): void {
    this.transport = null;
    for (const [, pending] of this.pending) {
      pending.reject(new RequestRejected("connection closed"));
    }
    this.pending.clear();
    this.setState("disconnected");
    if (!this.closed && this.retryTimer === null) {
      this.retryTimer = setTimeout(() => {
        this.retryTimer = null;
        this.connect();
      }, this.retryMs);
    }
  }

  private handleMessage(text: string): void {
    let msg: ServerMessage;
    try {
      msg = parseServerMessage(text);
    } catch (err) {
      if (err instanceof ProtocolFormatError) {
        this.protocolErrors += 1;
        this.emit("protocol-error");
        return;
      }
      throw err;
    }
    switch (msg.kind) {
      case "snapshot":
        this.applySnapshot(msg.payload);
        break;
      case "telemetry":
        if (this.buffer.push({ t: msg.t, payload: msg.payload })) {
          this.currentMode = msg.payload.mode;
          this.currentPhase = msg.payload.phase;
          this.emit("telemetry");
        }
        break;
      case "ack": {
        // an ack carrying cell parameters is server-confirmed state whether
        // or not we remember the request (e.g. a replayed recording)
        const p = msg.payload as Partial<{
          activity: string;
          phase: string;
          k: number;
          b: number;
          theta_eq: number;
        }>;
        if (
          typeof p.activity === "string" && typeof p.phase === "string" &&
          typeof p.k === "number" && typeof p.b === "number" &&
          typeof p.theta_eq === "number"
        ) {
          this.confirmedParams.set(cellKey(p.activity, p.phase), {
            k: p.k,
            b: p.b,
            theta_eq: p.theta_eq,
          });
          this.emit("params");
        }
        const pending = this.pending.get(msg.seq);
        if (pending !== undefined) {
          this.pending.delete(msg.seq);
          pending.resolve(msg);
        }
        break;
      }
      case "error": {
        if (msg.seq !== null) {
          const pending = this.pending.get(msg.seq);
          if (pending !== undefined) {
            this.pending.delete(msg.seq);
            // confirmed state untouched: the edit simply did not happen
            pending.reject(new RequestRejected(msg.payload.reason));
          }
          // an error for a sequence number we do not hold is stale
          break;
        }
        this.protocolErrors += 1;
        this.emit("protocol-error");
        break;
      }
    }
  }

  private applySnapshot(snapshot: SnapshotPayload): void {
    this.snapshot = snapshot;
    this.currentMode = snapshot.state.mode;
    this.currentPhase = snapshot.state.phase;
    this.confirmedParams.clear();
    const cells = snapshot.config.impedance.cells;
    for (const [activity, phases] of Object.entries(cells)) {
      for (const [phase, cell] of Object.entries(phases)) {
        this.confirmedParams.set(cellKey(activity, phase), { ...cell });
      }
    }
    const tunable = snapshot.config.impedance.tunable;
    this.tunable = tunable === "all" ? "all" : new Set(tunable);
    this.limits = {
      thetaMin: snapshot.config.device.theta_min_deg,
      thetaMax: snapshot.config.device.theta_max_deg,
    };
    this.setState("ready");
    this.emit("snapshot");
    this.emit("params");
  }

  get placement(): string | null {
    return this.snapshot?.config.placement ?? null;
  }

  isTunable(activity: Activity, phase: Phase): boolean {
    return this.tunable === "all" || this.tunable.has(cellKey(activity, phase));
  }

  editableCells(activity: Activity): Phase[] {
    return [...phasesFor(activity)];
  }

  sendParamUpdate(
    activity: Activity,
    phase: Phase,
    cell: ImpedanceCell,
  ): Promise<ServerMessage> {
    if (this.state !== "ready" || this.transport === null) {
      return Promise.reject(new RequestRejected("not connected"));
    }
    const problems = validateCell(cell, this.limits);
    if (problems.length > 0) {
      return Promise.reject(new RequestRejected(problems.join("; ")));
    }
    if (!this.isTunable(activity, phase)) {
      return Promise.reject(new RequestRejected(`cell ${cellKey(activity, phase)} is not tunable`));
    }
    const seq = this.nextSeq++;
    const text = makeParamUpdate(seq, activity, phase, cell);
    const promise = new Promise<ServerMessage>((resolve, reject) => {
      this.pending.set(seq, {
        kind: "param_update",
        detail: cellKey(activity, phase),
        resolve,
        reject,
      });
    });
    this.transport.send(text);
    return promise;
  }

  private pendingModeRequest(mode: Activity): Promise<ServerMessage> | null {
    for (const [seq, pending] of this.pending) {
      if (pending.kind === "mode_request" && pending.detail === mode) {
        // piggyback on the in-flight request: double-click, single effect
        return new Promise((resolve, reject) => {
          const prev = this.pending.get(seq)!;
          this.pending.set(seq, {
            ...prev,
            resolve: (msg) => {
              prev.resolve(msg);
              resolve(msg);
            },
            reject: (err) => {
              prev.reject(err);
              reject(err);
            },
          });
        });
      }
    }
    return null;
  }

  sendModeRequest(mode: Activity): Promise<ServerMessage> {
    if (this.state !== "ready" || this.transport === null) {
      return Promise.reject(new RequestRejected("not connected"));
    }
    const inFlight = this.pendingModeRequest(mode);
    if (inFlight !== null) return inFlight;
    const seq = this.nextSeq++;
    const promise = new Promise<ServerMessage>((resolve, reject) => {
      this.pending.set(seq, { kind: "mode_request", detail: mode, resolve, reject });
    });
    this.transport.send(makeModeRequest(seq, mode));
    return promise;
  }

  pendingCount(): number {
    return this.pending.size;
  }
}
