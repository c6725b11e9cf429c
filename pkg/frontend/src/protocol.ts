// Wire protocol spoken by the `kneesim serve` session service: one JSON
// object per WebSocket text message. Client commands carry a sequence
// number; each is answered by exactly one ack or error echoing it.

export const ACTIVITIES = [
  "level_walk",
  "ramp_ascent",
  "ramp_descent",
  "stair_ascent",
  "stair_descent",
  "sit_stand",
] as const;
export type Activity = (typeof ACTIVITIES)[number];

export const CYCLIC_PHASES = [
  "early_stance",
  "late_stance",
  "swing_flexion",
  "swing_extension",
] as const;
export const SITSTAND_PHASES = ["seated", "rising", "standing", "lowering"] as const;
export type Phase = (typeof CYCLIC_PHASES)[number] | (typeof SITSTAND_PHASES)[number];

export function phasesFor(activity: Activity): readonly Phase[] {
  return activity === "sit_stand" ? SITSTAND_PHASES : CYCLIC_PHASES;
}

export interface ImpedanceCell {
  k: number;
  b: number;
  theta_eq: number;
}

export interface TelemetryPayload {
  mode: Activity;
  phase: Phase;
  event: string;
  theta: number;
  theta_dot: number;
  f_vertical: number;
  m_sagittal: number;
  tau_cmd: number;
  saturated: boolean;
  active_params: ImpedanceCell;
}

export interface SnapshotConfig {
  placement: "above_knee" | "below_knee";
  participant: { id: string; body_mass_kg: number; height_cm: number };
  device: { theta_min_deg: number; theta_max_deg: number; torque_limit_nm: number };
  impedance: {
    tunable: "all" | string[];
    cells: Record<string, Record<string, ImpedanceCell>>;
  };
  [key: string]: unknown;
}

export interface SnapshotPayload {
  config: SnapshotConfig;
  state: { mode: Activity; phase: Phase };
}

export type ServerMessage =
  | { kind: "telemetry"; t: number; payload: TelemetryPayload }
  | { kind: "snapshot"; t: number; payload: SnapshotPayload }
  | { kind: "ack"; t: number; seq: number; payload: Record<string, unknown> }
  | { kind: "error"; t: number; seq: number | null; payload: { reason: string } };

export class ProtocolFormatError extends Error {}

function isObject(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function requireNumber(obj: Record<string, unknown>, key: string): number {
  const v = obj[key];
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new ProtocolFormatError(`field '${key}' must be a finite number`);
  }
  return v;
}

export function parseServerMessage(text: string): ServerMessage {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    throw new ProtocolFormatError("message is not valid JSON");
  }
  if (!isObject(data)) throw new ProtocolFormatError("message must be a JSON object");
  const kind = data["kind"];
  const payload = data["payload"];
  if (!isObject(payload)) throw new ProtocolFormatError("'payload' must be an object");

  switch (kind) {
    case "telemetry": {
      const p = payload as unknown as TelemetryPayload;
      if (!isObject(p.active_params)) {
        throw new ProtocolFormatError("telemetry missing active_params");
      }
      return { kind, t: requireNumber(data, "t"), payload: p };
    }
    case "snapshot": {
      const p = payload as unknown as SnapshotPayload;
      if (!isObject(p.config) || !isObject(p.state)) {
        throw new ProtocolFormatError("snapshot missing config/state");
      }
      return { kind, t: requireNumber(data, "t"), payload: p };
    }
    case "ack":
      return {
        kind,
        t: requireNumber(data, "t"),
        seq: requireNumber(data, "seq"),
        payload,
      };
    case "error": {
      const seq = data["seq"];
      const reason = (payload as { reason?: unknown }).reason;
      return {
        kind,
        t: requireNumber(data, "t"),
        seq: typeof seq === "number" ? seq : null,
        payload: { reason: typeof reason === "string" ? reason : "unknown error" },
      };
    }
    default:
      throw new ProtocolFormatError(`unknown message kind '${String(kind)}'`);
  }
}

export function makeParamUpdate(
  seq: number,
  activity: Activity,
  phase: Phase,
  cell: ImpedanceCell,
): string {
  return JSON.stringify({
    kind: "param_update",
    seq,
    payload: { activity, phase, k: cell.k, b: cell.b, theta_eq: cell.theta_eq },
  });
}

export function makeModeRequest(seq: number, mode: Activity): string {
  return JSON.stringify({ kind: "mode_request", seq, payload: { mode } });
}

export function cellKey(activity: string, phase: string): string {
  return `${activity}/${phase}`;
}

export interface ParamLimits {
  thetaMin: number;
  thetaMax: number;
}

// client-side validation mirrors the server's invariants so obviously bad
// edits never leave the console
export function validateCell(cell: ImpedanceCell, limits: ParamLimits): string[] {
  const problems: string[] = [];
  if (!Number.isFinite(cell.k) || cell.k < 0) problems.push("k must be >= 0");
  if (!Number.isFinite(cell.b) || cell.b < 0) problems.push("b must be >= 0");
  if (
    !Number.isFinite(cell.theta_eq) ||
    cell.theta_eq < limits.thetaMin ||
    cell.theta_eq > limits.thetaMax
  ) {
    problems.push(`theta_eq must be within [${limits.thetaMin}, ${limits.thetaMax}] deg`);
  }
  return problems;
}
