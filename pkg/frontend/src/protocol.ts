// Wire protocol of the bridge server. Text frames, JSON, world coordinates
// in meters.

export interface StateFrame {
  type: "state";
  t: number;
  pose: [number, number, number];
  xi_dot: [number, number];
  v_n: [number, number];
  scan: Array<[number, number]>;
  obstacles: ObstacleDescription[];
  delta_c: number | null;
  d_min: number | null;
  radius?: number;
}

export interface EventFrame {
  type: "event";
  kind: "collision" | "converged" | "stale_nominal";
}

export interface ErrorFrame {
  type: "error";
  message: string;
}

export type ServerFrame = StateFrame | EventFrame | ErrorFrame;

export interface ObstacleDescription {
  type: "circle" | "ellipse" | "polygon";
  center: [number, number];
  radius?: number;
  axes?: [number, number];
  vertices?: Array<[number, number]>;
  orientation?: number;
}

export interface NominalMessage {
  type: "nominal";
  v: [number, number];
}

function isVec2(v: unknown): v is [number, number] {
  return Array.isArray(v) && v.length === 2 &&
    typeof v[0] === "number" && typeof v[1] === "number";
}

/** Parse one server frame; returns null for anything malformed. */
export function parseServerFrame(text: string): ServerFrame | null {
  let msg: unknown;
  try {
    msg = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof msg !== "object" || msg === null) return null;
  const m = msg as Record<string, unknown>;
  if (m.type === "state") {
    if (!Array.isArray(m.pose) || m.pose.length !== 3) return null;
    if (!isVec2(m.xi_dot) || !isVec2(m.v_n)) return null;
    if (!Array.isArray(m.scan) || !Array.isArray(m.obstacles)) return null;
    if (typeof m.t !== "number") return null;
    return m as unknown as StateFrame;
  }
  if (m.type === "event") {
    if (m.kind === "collision" || m.kind === "converged" ||
        m.kind === "stale_nominal") {
      return m as unknown as EventFrame;
    }
    return null;
  }
  if (m.type === "error" && typeof m.message === "string") {
    return m as unknown as ErrorFrame;
  }
  return null;
}

export function nominalMessage(vx: number, vy: number): string {
  return JSON.stringify({ type: "nominal", v: [vx, vy] });
}
