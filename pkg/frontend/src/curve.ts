/**
 * Pure SVG rendering of the recall-vs-group-size curve. The layout is a
 * plain data structure so tests can assert marker placement without a DOM;
 * the elbow and Lee-Liu markers are placed on the points the service
 * reports — the client never recomputes them.
 */

import type { CurvePayload, CurvePoint } from "./api.js";

export interface PlacedPoint {
  point: CurvePoint;
  x: number;
  y: number;
}

export interface CurveLayout {
  width: number;
  height: number;
  pad: number;
  grid: PlacedPoint[];
  frontier: PlacedPoint[];
  /** Index into `frontier` of the service-reported elbow point. */
  elbowIndex: number;
  /** Index into `frontier` of the Lee-Liu point, or -1 if absent. */
  leeLiuIndex: number;
  degenerate: boolean;
}

function samePoint(a: CurvePoint, b: CurvePoint): boolean {
  return a.alpha_f === b.alpha_f && a.alpha_d === b.alpha_d;
}

export function layoutCurve(
  payload: CurvePayload,
  width = 560,
  height = 360,
  pad = 40,
): CurveLayout {
  const sizes = payload.points.map((p) => p.group_size);
  const maxSize = Math.max(1, ...sizes);
  const sx = (size: number) => pad + (size / maxSize) * (width - 2 * pad);
  const sy = (recall: number) => height - pad - recall * (height - 2 * pad);
  const place = (point: CurvePoint): PlacedPoint => ({
    point,
    x: sx(point.group_size),
    y: sy(point.recall_bar),
  });

  const frontier = payload.frontier.map(place);
  const elbowIndex = payload.frontier.findIndex((p) => samePoint(p, payload.elbow));
  const leeLiuIndex = payload.lee_liu
    ? payload.frontier.findIndex((p) => samePoint(p, payload.lee_liu as CurvePoint))
    : -1;
  return {
    width,
    height,
    pad,
    grid: payload.points.map(place),
    frontier,
    elbowIndex,
    leeLiuIndex,
    degenerate: payload.degenerate,
  };
}

/** The placed elbow marker; null only if the service payload was inconsistent. */
export function elbowMarker(layout: CurveLayout): PlacedPoint | null {
  return layout.elbowIndex >= 0 ? layout.frontier[layout.elbowIndex] : null;
}

/** Frontier point nearest to a click, within `radius` px, else null. */
export function nearestFrontierPoint(
  layout: CurveLayout,
  x: number,
  y: number,
  radius = 14,
): PlacedPoint | null {
  let best: PlacedPoint | null = null;
  let bestDist = radius * radius;
  for (const placed of layout.frontier) {
    const dist = (placed.x - x) ** 2 + (placed.y - y) ** 2;
    if (dist <= bestDist) {
      best = placed;
      bestDist = dist;
    }
  }
  return best;
}

function esc(value: string | number): string {
  return String(value).replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

/**
 * SVG markup for the curve screen. Frontier points carry data-alpha-f /
 * data-alpha-d so the click handler can POST the chosen cut-offs; the
 * elbow marker carries class "elbow-marker", Lee-Liu "lee-liu-marker".
 */
export function curveSvg(layout: CurveLayout): string {
  const parts: string[] = [];
  const { width, height, pad } = layout;
  parts.push(
    `<svg viewBox="0 0 ${width} ${height}" class="curve${layout.degenerate ? " degenerate" : ""}" role="img">`,
  );
  parts.push(
    `<line class="axis" x1="${pad}" y1="${height - pad}" x2="${width - pad}" y2="${height - pad}"/>`,
    `<line class="axis" x1="${pad}" y1="${pad}" x2="${pad}" y2="${height - pad}"/>`,
    `<text class="axis-label" x="${width / 2}" y="${height - 8}">group size</text>`,
    `<text class="axis-label" x="12" y="${height / 2}" transform="rotate(-90 12 ${height / 2})">estimated recall</text>`,
  );
  for (const placed of layout.grid) {
    parts.push(`<circle class="grid-point" cx="${placed.x}" cy="${placed.y}" r="2.5"/>`);
  }
  if (layout.frontier.length > 1) {
    const path = layout.frontier.map((p) => `${p.x},${p.y}`).join(" ");
    parts.push(`<polyline class="frontier-line" points="${path}"/>`);
  }
  layout.frontier.forEach((placed, index) => {
    const classes = ["frontier-point"];
    if (index === layout.elbowIndex) classes.push("elbow-marker");
    if (index === layout.leeLiuIndex) classes.push("lee-liu-marker");
    parts.push(
      `<circle class="${classes.join(" ")}" cx="${placed.x}" cy="${placed.y}" r="6"` +
        ` data-alpha-f="${esc(placed.point.alpha_f)}" data-alpha-d="${esc(placed.point.alpha_d)}">` +
        `<title>size ${esc(placed.point.group_size)}, recall ${esc(
          placed.point.recall_bar.toFixed(3),
        )} (α_F=${esc(placed.point.alpha_f)}, α_D=${esc(placed.point.alpha_d)})</title></circle>`,
    );
  });
  if (layout.degenerate) {
    parts.push(
      `<text class="degenerate-warning" x="${width / 2}" y="${pad - 12}">` +
        `degenerate curve — review the elbow manually</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n");
}
