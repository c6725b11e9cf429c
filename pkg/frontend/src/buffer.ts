// Rolling telemetry window. Samples must arrive in timestamp order;
// out-of-order samples are dropped and counted, never rendered.

import type { TelemetryPayload } from "./protocol.js";

export interface TelemetrySample {
  t: number;
  payload: TelemetryPayload;
}

export class TelemetryBuffer {
  private samples_: TelemetrySample[] = [];
  private dropped_ = 0;

  constructor(public readonly windowS: number = 10.0) {}

  get droppedOutOfOrder(): number {
    return this.dropped_;
  }

  get latest(): TelemetrySample | undefined {
    return this.samples_[this.samples_.length - 1];
  }

  push(sample: TelemetrySample): boolean {
    const last = this.latest;
    if (last !== undefined && sample.t <= last.t) {
      this.dropped_ += 1;
      return false;
    }
    this.samples_.push(sample);
    const cutoff = sample.t - this.windowS;
    let firstKept = 0;
    while (firstKept < this.samples_.length && this.samples_[firstKept]!.t < cutoff) {
      firstKept += 1;
    }
    if (firstKept > 0) this.samples_.splice(0, firstKept);
    return true;
  }

  samples(): readonly TelemetrySample[] {
    return this.samples_;
  }

  clear(): void {
    this.samples_ = [];
    this.dropped_ = 0;
  }
}
