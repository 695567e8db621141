// Operator input: WASD / arrow keys give a unit direction scaled by the
// speed slider; pointer drag gives analog direction and magnitude. Commands
// go out immediately on every change and on a 20 Hz heartbeat, so the
// input-to-send latency is bounded by the event loop, not the heartbeat.

export type SendFn = (vx: number, vy: number) => void;

export const HEARTBEAT_MS = 50;

const KEY_DIRS: Record<string, [number, number]> = {
  ArrowUp: [0, 1], KeyW: [0, 1],
  ArrowDown: [0, -1], KeyS: [0, -1],
  ArrowLeft: [-1, 0], KeyA: [-1, 0],
  ArrowRight: [1, 0], KeyD: [1, 0],
};

export class CommandSource {
  private pressed = new Set<string>();
  private drag: [number, number] | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  maxSpeed: number;

  constructor(private send: SendFn, maxSpeed = 1.0) {
    this.maxSpeed = maxSpeed;
  }

  start(): void {
    if (this.timer === null) {
      this.timer = setInterval(() => this.emit(), HEARTBEAT_MS);
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /** Current command in m/s (world frame). */
  current(): [number, number] {
    if (this.drag) {
      return this.drag;
    }
    let x = 0;
    let y = 0;
    for (const code of this.pressed) {
      const d = KEY_DIRS[code];
      if (d) {
        x += d[0];
        y += d[1];
      }
    }
    const norm = Math.hypot(x, y);
    if (norm < 1e-9) return [0, 0];
    return [(x / norm) * this.maxSpeed, (y / norm) * this.maxSpeed];
  }

  keyDown(code: string): void {
    if (code in KEY_DIRS && !this.pressed.has(code)) {
      this.pressed.add(code);
      this.emit();
    }
  }

  keyUp(code: string): void {
    if (this.pressed.delete(code)) this.emit();
  }

  /** Pointer drag vector in world meters (already scaled by the caller). */
  dragTo(vx: number, vy: number): void {
    const norm = Math.hypot(vx, vy);
    if (norm > this.maxSpeed) {
      vx = (vx / norm) * this.maxSpeed;
      vy = (vy / norm) * this.maxSpeed;
    }
    this.drag = [vx, vy];
    this.emit();
  }

  dragEnd(): void {
    this.drag = null;
    this.emit();
  }

  private emit(): void {
    const [vx, vy] = this.current();
    this.send(vx, vy);
  }
}
