// Strip gauges for the controller contribution and the closest distance.

import { Canvas2D } from "./renderer.js";

export interface GaugeSpec {
  label: string;
  min: number;
  max: number;
  /** value above/below which the bar turns red */
  alert?: { above?: number; below?: number };
}

export class StripGauge {
  value: number | null = null;

  constructor(private spec: GaugeSpec) {}

  set(value: number | null): void {
    this.value = value;
  }

  /** Fraction of the bar filled, clamped to [0, 1]. */
  fraction(): number {
    if (this.value === null || !isFinite(this.value)) return 1;
    const f = (this.value - this.spec.min) / (this.spec.max - this.spec.min);
    return Math.max(0, Math.min(1, f));
  }

  alerted(): boolean {
    if (this.value === null) return false;
    const a = this.spec.alert;
    if (!a) return false;
    if (a.above !== undefined && this.value > a.above) return true;
    if (a.below !== undefined && this.value < a.below) return true;
    return false;
  }

  draw(ctx: Canvas2D, x: number, y: number, w: number, h: number): void {
    ctx.fillStyle = "#e8e8e8";
    ctx.fillRect(x, y, w, h);
    ctx.fillStyle = this.alerted() ? "#d62728" : "#1f77b4";
    ctx.fillRect(x, y, w * this.fraction(), h);
  }

  get label(): string {
    return this.spec.label;
  }
}

export function makeGauges(): { deltaC: StripGauge; dMin: StripGauge } {
  return {
    deltaC: new StripGauge({
      label: "control contribution", min: 0, max: 2, alert: { above: 0.5 },
    }),
    dMin: new StripGauge({
      label: "closest distance [m]", min: 0, max: 5, alert: { below: 0.45 },
    }),
  };
}
