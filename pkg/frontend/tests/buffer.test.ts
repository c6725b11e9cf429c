import { describe, expect, it } from "vitest";

import { TelemetryBuffer, type TelemetrySample } from "../src/buffer.js";
import type { TelemetryPayload } from "../src/protocol.js";

function sample(t: number, theta = 0): TelemetrySample {
  const payload: TelemetryPayload = {
    mode: "level_walk", phase: "early_stance", event: "",
    theta, theta_dot: 0, f_vertical: 0, m_sagittal: 0,
    tau_cmd: 0, saturated: false,
    active_params: { k: 1, b: 0, theta_eq: 0 },
  };
  return { t, payload };
}

describe("TelemetryBuffer", () => {
  it("keeps samples in order and evicts outside the window", () => {
    const buffer = new TelemetryBuffer(2.0);
    for (let i = 0; i <= 30; i++) buffer.push(sample(i * 0.1));
    const times = buffer.samples().map((s) => s.t);
    expect(Math.min(...times)).toBeGreaterThanOrEqual(3.0 - 2.0 - 1e-9);
    expect(Math.max(...times)).toBeCloseTo(3.0);
  });

  it("drops and counts out-of-order samples", () => {
    const buffer = new TelemetryBuffer(10.0);
    expect(buffer.push(sample(1.0))).toBe(true);
    expect(buffer.push(sample(0.5))).toBe(false);
    expect(buffer.push(sample(1.0))).toBe(false); // duplicates count too
    expect(buffer.push(sample(1.5))).toBe(true);
    expect(buffer.droppedOutOfOrder).toBe(2);
    expect(buffer.samples().map((s) => s.t)).toEqual([1.0, 1.5]);
  });

  it("clear resets samples and counters", () => {
    const buffer = new TelemetryBuffer(10.0);
    buffer.push(sample(1.0));
    buffer.push(sample(0.1));
    buffer.clear();
    expect(buffer.samples()).toHaveLength(0);
    expect(buffer.droppedOutOfOrder).toBe(0);
    expect(buffer.push(sample(0.05))).toBe(true); // fresh run after clear
  });
});
