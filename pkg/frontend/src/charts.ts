// Strip-chart geometry and rendering. The polyline/band computations are
// pure so they can be tested headless; only draw* touches a canvas.

import type { TelemetrySample } from "./buffer.js";
import type { Phase, TelemetryPayload } from "./protocol.js";

export interface ChartSpec {
  label: string;
  accessor: (p: TelemetryPayload) => number;
  yMin: number;
  yMax: number;
  color: string;
}

export const PHASE_COLORS: Record<Phase, string> = {
  early_stance: "#2b4c7e",
  late_stance: "#39679f",
  swing_flexion: "#8a5a2b",
  swing_extension: "#b07a3a",
  seated: "#4a3a6b",
  rising: "#5d4a85",
  standing: "#6f5aa0",
  lowering: "#5d4a85",
};

/** Flat [x0, y0, x1, y1, ...] pixel polyline for the trailing window. */
export function computePolyline(
  samples: readonly TelemetrySample[],
  accessor: (p: TelemetryPayload) => number,
  tNow: number,
  windowS: number,
  width: number,
  height: number,
  yMin: number,
  yMax: number,
): number[] {
  const points: number[] = [];
  const t0 = tNow - windowS;
  const span = yMax - yMin || 1.0;
  for (const sample of samples) {
    if (sample.t < t0) continue;
    const x = ((sample.t - t0) / windowS) * width;
    const value = accessor(sample.payload);
    const clamped = Math.min(Math.max(value, yMin), yMax);
    const y = height - ((clamped - yMin) / span) * height;
    points.push(x, y);
  }
  return points;
}

export interface PhaseBand {
  x0: number;
  x1: number;
  phase: Phase;
}

/** Contiguous per-phase bands across the trailing window. */
export function computePhaseBands(
  samples: readonly TelemetrySample[],
  tNow: number,
  windowS: number,
  width: number,
): PhaseBand[] {
  const bands: PhaseBand[] = [];
  const t0 = tNow - windowS;
  const toX = (t: number) => ((Math.max(t, t0) - t0) / windowS) * width;
  let start: number | null = null;
  let phase: Phase | null = null;
  for (const sample of samples) {
    if (sample.t < t0) continue;
    if (phase === null) {
      phase = sample.payload.phase;
      start = sample.t;
    } else if (sample.payload.phase !== phase) {
      bands.push({ x0: toX(start!), x1: toX(sample.t), phase });
      phase = sample.payload.phase;
      start = sample.t;
    }
  }
  if (phase !== null && start !== null) {
    bands.push({ x0: toX(start), x1: toX(tNow), phase });
  }
  return bands;
}

export function drawStrip(
  ctx: CanvasRenderingContext2D,
  samples: readonly TelemetrySample[],
  spec: ChartSpec,
  tNow: number,
  windowS: number,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#10141c";
  ctx.fillRect(0, 0, width, height);
  const points = computePolyline(
    samples, spec.accessor, tNow, windowS, width, height, spec.yMin, spec.yMax,
  );
  ctx.strokeStyle = spec.color;
  ctx.lineWidth = 1.4;
  ctx.beginPath();
  for (let i = 0; i < points.length; i += 2) {
    const x = points[i]!;
    const y = points[i + 1]!;
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  }
  ctx.stroke();
  ctx.fillStyle = "#9aa7bd";
  ctx.font = "11px system-ui, sans-serif";
  ctx.fillText(spec.label, 6, 14);
}

export function drawPhaseBand(
  ctx: CanvasRenderingContext2D,
  samples: readonly TelemetrySample[],
  tNow: number,
  windowS: number,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  for (const band of computePhaseBands(samples, tNow, windowS, width)) {
    ctx.fillStyle = PHASE_COLORS[band.phase] ?? "#333";
    ctx.fillRect(band.x0, 0, Math.max(band.x1 - band.x0, 1), height);
  }
}
