import { describe, expect, it } from "vitest";

import { ViewTransform, includePoint } from "../src/transform.js";

describe("ViewTransform", () => {
  it("round-trips world <-> screen", () => {
    const view = new ViewTransform(720, 720,
      { xmin: -5, ymin: -5, xmax: 5, ymax: 5 });
    const [px, py] = view.toScreen(1.25, -2.5);
    const [wx, wy] = view.toWorld(px, py);
    expect(wx).toBeCloseTo(1.25, 9);
    expect(wy).toBeCloseTo(-2.5, 9);
  });

  it("keeps aspect fixed for non-square bounds", () => {
    const view = new ViewTransform(720, 720,
      { xmin: 0, ymin: 0, xmax: 20, ymax: 5 });
    // one meter maps to the same pixel length in x and y
    const [x0, y0] = view.toScreen(0, 0);
    const [x1, y1] = view.toScreen(1, 1);
    expect(Math.abs(x1 - x0)).toBeCloseTo(Math.abs(y1 - y0), 9);
  });

  it("flips y (world up is screen up)", () => {
    const view = new ViewTransform(720, 720,
      { xmin: -5, ymin: -5, xmax: 5, ymax: 5 });
    const [, yLow] = view.toScreen(0, -4);
    const [, yHigh] = view.toScreen(0, 4);
    expect(yHigh).toBeLessThan(yLow);
  });

  it("centers the bounding box", () => {
    const view = new ViewTransform(400, 400,
      { xmin: 2, ymin: 2, xmax: 6, ymax: 6 });
    const [cx, cy] = view.toScreen(4, 4);
    expect(cx).toBeCloseTo(200, 6);
    expect(cy).toBeCloseTo(200, 6);
  });

  it("grows bounds with includePoint", () => {
    const b = includePoint({ xmin: 0, ymin: 0, xmax: 1, ymax: 1 }, -2, 3);
    expect(b).toEqual({ xmin: -2, ymin: 0, xmax: 1, ymax: 3 });
  });
});
