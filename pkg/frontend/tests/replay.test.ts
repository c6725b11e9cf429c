// Replay of a recorded live-session transcript: the console must ingest the
// whole stream and produce renderable chart geometry without errors.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { computePhaseBands, computePolyline } from "../src/charts.js";
import { ConsoleSession } from "../src/session.js";
import { fakeFactory } from "./fake_transport.js";

const FIXTURE = join(dirname(fileURLToPath(import.meta.url)),
                     "fixtures", "recorded_session.ndjson");

function replaySession() {
  const { factory, transports } = fakeFactory();
  const session = new ConsoleSession("ws://replay", factory, { windowS: 10, retryMs: 5 });
  session.connect();
  const transport = transports[0]!;
  transport.open();
  const lines = readFileSync(FIXTURE, "utf-8").split("\n").filter((l) => l.trim());
  for (const line of lines) transport.receive(line);
  return { session, lines };
}

describe("recorded session replay", () => {
  it("ingests the full transcript without protocol errors", () => {
    const { session, lines } = replaySession();
    expect(lines.length).toBeGreaterThan(100);
    expect(session.protocolErrors).toBe(0);
    expect(session.state).toBe("ready");
  });

  it("applies the snapshot and the acknowledged edit", () => {
    const { session } = replaySession();
    expect(session.placement).toBe("above_knee");
    // the recording contains an acknowledged stiffness edit ...
    expect(session.confirmedParams.get("level_walk/early_stance")!.k).toBe(5.0);
    // ... and a rejected one, which must leave the snapshot value in place
    expect(session.confirmedParams.get("level_walk/late_stance")!.k).toBe(3.0);
  });

  it("keeps telemetry monotone and renders chart geometry", () => {
    const { session } = replaySession();
    const samples = session.buffer.samples();
    expect(samples.length).toBeGreaterThan(20);
    for (let i = 1; i < samples.length; i++) {
      expect(samples[i]!.t).toBeGreaterThan(samples[i - 1]!.t);
    }
    const tNow = session.buffer.latest!.t;
    const polyline = computePolyline(
      samples, (p) => p.theta, tNow, session.buffer.windowS, 760, 110, -5, 125,
    );
    expect(polyline.length).toBeGreaterThan(40);
    for (const v of polyline) expect(Number.isFinite(v)).toBe(true);

    const bands = computePhaseBands(samples, tNow, session.buffer.windowS, 760);
    expect(bands.length).toBeGreaterThan(2);
    for (const band of bands) {
      expect(band.x1).toBeGreaterThanOrEqual(band.x0);
      expect(band.x0).toBeGreaterThanOrEqual(0);
      expect(band.x1).toBeLessThanOrEqual(760);
    }
    // the recorded key-fob press is visible as a mode change in telemetry
    expect(samples.some((s) => s.payload.mode === "ramp_ascent")).toBe(true);
  });
});
