import { describe, expect, it } from "vitest";

import type { CurvePayload, CurvePoint } from "../src/api.js";
import { curveSvg, elbowMarker, layoutCurve, nearestFrontierPoint } from "../src/curve.js";

function pt(alphaF: number, alphaD: number, size: number, recall: number): CurvePoint {
  return { alpha_f: alphaF, alpha_d: alphaD, group_size: size, recall_bar: recall };
}

// Mirrors the calibration backend's hand-computed example: on this frontier
// the elbow is the (20, 0.90) point.
const FRONTIER = [pt(0, 0, 10, 0.5), pt(1, 1, 20, 0.9), pt(2, 2, 30, 0.92), pt(3, 3, 40, 0.93)];

function payload(overrides: Partial<CurvePayload> = {}): CurvePayload {
  return {
    points: FRONTIER,
    frontier: FRONTIER,
    elbow: FRONTIER[1],
    lee_liu: FRONTIER[2],
    degenerate: false,
    ...overrides,
  };
}

describe("elbow marker placement", () => {
  it("marks exactly the point the service reports as the elbow", () => {
    const layout = layoutCurve(payload());
    const marker = elbowMarker(layout);
    expect(marker).not.toBeNull();
    expect(marker!.point.group_size).toBe(20);
    expect(marker!.point.recall_bar).toBe(0.9);
    // the marker is the placed frontier point itself, not a re-derivation
    expect(marker).toBe(layout.frontier[1]);
  });

  it("emits exactly one elbow-marker element in the SVG", () => {
    const svg = curveSvg(layoutCurve(payload()));
    expect(svg.match(/elbow-marker/g)).toHaveLength(1);
    const markerLine = svg.split("\n").find((line) => line.includes("elbow-marker"))!;
    expect(markerLine).toContain('data-alpha-f="1"');
    expect(markerLine).toContain('data-alpha-d="1"');
  });

  it("follows the service even if a different point is flagged", () => {
    const layout = layoutCurve(payload({ elbow: FRONTIER[2] }));
    expect(elbowMarker(layout)!.point.group_size).toBe(30);
  });

  it("marks the Lee-Liu point separately", () => {
    const svg = curveSvg(layoutCurve(payload()));
    expect(svg.match(/lee-liu-marker/g)).toHaveLength(1);
  });
});

describe("layout geometry", () => {
  it("places higher recall higher on the screen and bigger groups further right", () => {
    const layout = layoutCurve(payload());
    const [a, b] = [layout.frontier[0], layout.frontier[1]];
    expect(b.x).toBeGreaterThan(a.x);
    expect(b.y).toBeLessThan(a.y); // SVG y grows downward
  });

  it("keeps every point inside the padded viewport", () => {
    const layout = layoutCurve(payload(), 560, 360, 40);
    for (const placed of [...layout.grid, ...layout.frontier]) {
      expect(placed.x).toBeGreaterThanOrEqual(40);
      expect(placed.x).toBeLessThanOrEqual(520);
      expect(placed.y).toBeGreaterThanOrEqual(40);
      expect(placed.y).toBeLessThanOrEqual(320);
    }
  });
});

describe("frontier point hit-testing", () => {
  it("returns the nearest frontier point within the radius", () => {
    const layout = layoutCurve(payload());
    const target = layout.frontier[2];
    const hit = nearestFrontierPoint(layout, target.x + 3, target.y - 3);
    expect(hit).toBe(target);
  });

  it("misses clicks far from any point", () => {
    const layout = layoutCurve(payload());
    expect(nearestFrontierPoint(layout, 1, 1)).toBeNull();
  });
});

describe("degenerate curve", () => {
  it("renders the warning overlay when flagged", () => {
    const svg = curveSvg(layoutCurve(payload({ degenerate: true })));
    expect(svg).toContain("degenerate-warning");
    expect(svg).toContain('class="curve degenerate"');
  });

  it("omits the warning otherwise", () => {
    const svg = curveSvg(layoutCurve(payload()));
    expect(svg).not.toContain("degenerate-warning");
  });
});
