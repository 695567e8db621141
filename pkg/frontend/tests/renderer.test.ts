import { describe, expect, it } from "vitest";

import { StateFrame } from "../src/protocol.js";
import { Canvas2D, SceneRenderer } from "../src/renderer.js";
import { makeGauges } from "../src/gauges.js";

/** Headless context stub counting draw operations. */
class StubContext implements Canvas2D {
  fillStyle: string = "";
  strokeStyle: string = "";
  lineWidth = 1;
  globalAlpha = 1;
  ops = 0;
  clearRect() { this.ops++; }
  fillRect() { this.ops++; }
  beginPath() { this.ops++; }
  moveTo() { this.ops++; }
  lineTo() { this.ops++; }
  arc() { this.ops++; }
  ellipse() { this.ops++; }
  closePath() { this.ops++; }
  fill() { this.ops++; }
  stroke() { this.ops++; }
}

function bigFrame(nPoints: number): StateFrame {
  const scan: Array<[number, number]> = [];
  for (let i = 0; i < nPoints; i++) {
    const a = (2 * Math.PI * i) / nPoints;
    scan.push([4 * Math.cos(a), 4 * Math.sin(a)]);
  }
  return {
    type: "state", t: 0.1, pose: [0.2, -0.1, 0.4], xi_dot: [0.8, 0.1],
    v_n: [1, 0], scan,
    obstacles: [
      { type: "circle", center: [2, 1], radius: 0.6 },
      { type: "ellipse", center: [-2, 1], axes: [1.2, 0.5], orientation: 0.3 },
      { type: "polygon", center: [0, -2],
        vertices: [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]] },
    ],
    delta_c: 0.1, d_min: 2.0, radius: 0.45,
  };
}

describe("SceneRenderer", () => {
  it("draws a 512-point frame fast enough for 30 fps", () => {
    const ctx = new StubContext();
    const r = new SceneRenderer(ctx, 720, 720);
    const frame = bigFrame(512);
    r.render(frame); // warm up
    const n = 120;
    const t0 = performance.now();
    for (let i = 0; i < n; i++) r.render(frame, i);
    const perFrameMs = (performance.now() - t0) / n;
    expect(perFrameMs).toBeLessThan(1000 / 30);
    expect(ctx.ops).toBeGreaterThan(0);
  });

  it("renders empty obstacle lists (robot and trail only)", () => {
    const ctx = new StubContext();
    const r = new SceneRenderer(ctx, 400, 400);
    const frame = { ...bigFrame(0), obstacles: [] };
    r.render(frame);
    expect(ctx.ops).toBeGreaterThan(5);
  });

  it("collision flash overlays for a bounded time", () => {
    const ctx = new StubContext();
    const r = new SceneRenderer(ctx, 400, 400);
    const frame = bigFrame(4);
    // saturate the trail buffer so every render costs the same
    for (let i = 0; i < 601; i++) r.render(frame, 0);
    const a = ctx.ops;
    r.render(frame, 1);               // baseline ops per render
    const base = ctx.ops - a;
    r.flashCollision(6000);
    const b = ctx.ops;
    r.render(frame, 6100);            // flash active: one extra overlay rect
    const withFlash = ctx.ops - b;
    expect(withFlash).toBe(base + 1);
    const c = ctx.ops;
    r.render(frame, 9000);            // expired again
    expect(ctx.ops - c).toBe(base);
  });

  it("auto-fits to the frame content", () => {
    const ctx = new StubContext();
    const r = new SceneRenderer(ctx, 720, 720);
    const frame = bigFrame(16);
    r.fitTo(frame);
    const [px, py] = r.view.toScreen(frame.pose[0], frame.pose[1]);
    expect(px).toBeGreaterThan(0);
    expect(px).toBeLessThan(720);
    expect(py).toBeGreaterThan(0);
    expect(py).toBeLessThan(720);
  });
});

describe("gauges", () => {
  it("clamps and alerts", () => {
    const { deltaC, dMin } = makeGauges();
    deltaC.set(3.5);
    expect(deltaC.fraction()).toBe(1);
    expect(deltaC.alerted()).toBe(true);
    dMin.set(0.2);
    expect(dMin.alerted()).toBe(true);
    dMin.set(3.0);
    expect(dMin.alerted()).toBe(false);
    deltaC.set(null);
    expect(deltaC.alerted()).toBe(false);
  });

  it("draws two rects per gauge", () => {
    const ctx = new StubContext();
    const { deltaC } = makeGauges();
    deltaC.set(0.3);
    deltaC.draw(ctx, 0, 0, 100, 10);
    expect(ctx.ops).toBe(2);
  });
});
