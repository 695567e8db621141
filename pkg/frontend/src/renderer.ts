// Canvas scene renderer. Drawing goes through the Canvas2D subset below so
// the tests can drive it with a headless stub.

import { ObstacleDescription, StateFrame } from "./protocol.js";
import { Bounds, ViewTransform, includePoint } from "./transform.js";

export interface Canvas2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  ellipse(x: number, y: number, rx: number, ry: number, rot: number,
          a0: number, a1: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
}

const TRAIL_LIMIT = 600;

export class SceneRenderer {
  private trail: Array<[number, number]> = [];
  private flashUntil = 0;
  view: ViewTransform;

  constructor(
    private ctx: Canvas2D,
    private width: number,
    private height: number,
    bounds?: Bounds,
  ) {
    this.view = new ViewTransform(width, height,
      bounds ?? { xmin: -6, ymin: -6, xmax: 6, ymax: 6 });
  }

  fitTo(frame: StateFrame): void {
    let b: Bounds = {
      xmin: frame.pose[0] - 3, ymin: frame.pose[1] - 3,
      xmax: frame.pose[0] + 3, ymax: frame.pose[1] + 3,
    };
    for (const o of frame.obstacles) {
      b = includePoint(b, o.center[0], o.center[1]);
    }
    for (const p of frame.scan) b = includePoint(b, p[0], p[1]);
    this.view.fit(b);
  }

  flashCollision(nowMs: number): void {
    this.flashUntil = nowMs + 450;
  }

  /** Draw one full frame; pure function of (frame, trail, flash state). */
  render(frame: StateFrame, nowMs = 0): void {
    const ctx = this.ctx;
    ctx.globalAlpha = 1;
    ctx.fillStyle = "#fafafa";
    ctx.clearRect(0, 0, this.width, this.height);
    ctx.fillRect(0, 0, this.width, this.height);

    for (const o of frame.obstacles) this.drawObstacle(o);
    this.drawScan(frame.scan);
    this.drawTrail(frame.pose[0], frame.pose[1]);
    this.drawRobot(frame);
    this.drawArrow(frame.pose[0], frame.pose[1], frame.v_n, "#999");
    this.drawArrow(frame.pose[0], frame.pose[1], frame.xi_dot, "#1f77b4");
    if (nowMs < this.flashUntil) {
      ctx.globalAlpha = 0.25;
      ctx.fillStyle = "#d62728";
      ctx.fillRect(0, 0, this.width, this.height);
      ctx.globalAlpha = 1;
    }
  }

  private drawObstacle(o: ObstacleDescription): void {
    const ctx = this.ctx;
    const [cx, cy] = this.view.toScreen(o.center[0], o.center[1]);
    ctx.fillStyle = "#b5651d";
    ctx.globalAlpha = 0.85;
    ctx.beginPath();
    if (o.type === "circle" && o.radius !== undefined) {
      ctx.arc(cx, cy, this.view.metersToPixels(o.radius), 0, 2 * Math.PI);
    } else if (o.type === "ellipse" && o.axes) {
      ctx.ellipse(cx, cy, this.view.metersToPixels(o.axes[0]),
        this.view.metersToPixels(o.axes[1]), -(o.orientation ?? 0),
        0, 2 * Math.PI);
    } else if (o.vertices) {
      const rot = o.orientation ?? 0;
      const c = Math.cos(rot);
      const s = Math.sin(rot);
      o.vertices.forEach((v, i) => {
        const wx = o.center[0] + c * v[0] - s * v[1];
        const wy = o.center[1] + s * v[0] + c * v[1];
        const [px, py] = this.view.toScreen(wx, wy);
        if (i === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      });
      ctx.closePath();
    }
    ctx.fill();
    ctx.globalAlpha = 1;
  }

  private drawScan(points: Array<[number, number]>): void {
    const ctx = this.ctx;
    ctx.fillStyle = "#222";
    for (const p of points) {
      const [px, py] = this.view.toScreen(p[0], p[1]);
      ctx.beginPath();
      ctx.arc(px, py, 1.6, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  private drawTrail(x: number, y: number): void {
    this.trail.push([x, y]);
    if (this.trail.length > TRAIL_LIMIT) this.trail.shift();
    const ctx = this.ctx;
    ctx.strokeStyle = "#9ecae9";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    this.trail.forEach((p, i) => {
      const [px, py] = this.view.toScreen(p[0], p[1]);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }

  private drawRobot(frame: StateFrame): void {
    const ctx = this.ctx;
    const [px, py] = this.view.toScreen(frame.pose[0], frame.pose[1]);
    const r = this.view.metersToPixels(frame.radius ?? 0.45);
    ctx.fillStyle = "#2ca02c";
    ctx.globalAlpha = 0.9;
    ctx.beginPath();
    ctx.arc(px, py, r, 0, 2 * Math.PI);
    ctx.fill();
    ctx.globalAlpha = 1;
    // heading tick
    const hx = frame.pose[0] + Math.cos(frame.pose[2]) * (frame.radius ?? 0.45);
    const hy = frame.pose[1] + Math.sin(frame.pose[2]) * (frame.radius ?? 0.45);
    const [tx, ty] = this.view.toScreen(hx, hy);
    ctx.strokeStyle = "#14541a";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(px, py);
    ctx.lineTo(tx, ty);
    ctx.stroke();
  }

  private drawArrow(x: number, y: number, v: [number, number],
                    color: string): void {
    const norm = Math.hypot(v[0], v[1]);
    if (norm < 1e-6) return;
    const scale = 1.2; // seconds of travel shown
    const ctx = this.ctx;
    const [x0, y0] = this.view.toScreen(x, y);
    const [x1, y1] = this.view.toScreen(x + v[0] * scale, y + v[1] * scale);
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(x0, y0);
    ctx.lineTo(x1, y1);
    const ang = Math.atan2(y1 - y0, x1 - x0);
    const head = 8;
    ctx.moveTo(x1, y1);
    ctx.lineTo(x1 - head * Math.cos(ang - 0.4), y1 - head * Math.sin(ang - 0.4));
    ctx.moveTo(x1, y1);
    ctx.lineTo(x1 - head * Math.cos(ang + 0.4), y1 - head * Math.sin(ang + 0.4));
    ctx.stroke();
  }
}
