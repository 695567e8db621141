// World <-> screen transform that auto-fits a bounding box with fixed
// aspect ratio (y up in the world, y down on the canvas).

export interface Bounds {
  xmin: number;
  ymin: number;
  xmax: number;
  ymax: number;
}

export class ViewTransform {
  private scale = 1;
  private cx = 0;
  private cy = 0;

  constructor(
    public width: number,
    public height: number,
    bounds?: Bounds,
    pad = 0.06,
  ) {
    if (bounds) this.fit(bounds, pad);
  }

  fit(bounds: Bounds, pad = 0.06): void {
    const spanX = Math.max(bounds.xmax - bounds.xmin, 1e-6);
    const spanY = Math.max(bounds.ymax - bounds.ymin, 1e-6);
    const span = Math.max(spanX, spanY) * (1 + 2 * pad);
    this.scale = Math.min(this.width, this.height) / span;
    this.cx = (bounds.xmin + bounds.xmax) / 2;
    this.cy = (bounds.ymin + bounds.ymax) / 2;
  }

  toScreen(x: number, y: number): [number, number] {
    return [
      this.width / 2 + (x - this.cx) * this.scale,
      this.height / 2 - (y - this.cy) * this.scale,
    ];
  }

  toWorld(px: number, py: number): [number, number] {
    return [
      this.cx + (px - this.width / 2) / this.scale,
      this.cy - (py - this.height / 2) / this.scale,
    ];
  }

  metersToPixels(m: number): number {
    return m * this.scale;
  }
}

/** Grow a bounds box to include a point. */
export function includePoint(b: Bounds, x: number, y: number): Bounds {
  return {
    xmin: Math.min(b.xmin, x),
    ymin: Math.min(b.ymin, y),
    xmax: Math.max(b.xmax, x),
    ymax: Math.max(b.ymax, y),
  };
}
