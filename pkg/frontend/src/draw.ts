// Canvas drawing, written against a minimal 2D-context interface so tests
// can inject a recording stub (jsdom has no canvas implementation).

import { axisEndpoints, quadPoint, radarVertices } from "./radar";
import type { AxisValue, ScreenPoint } from "./types";

export interface Draw2D {
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
}

export const GLYPH_COLORS = [
  "#e4572e",
  "#2e86ab",
  "#44af69",
  "#9650a6",
  "#e0a100",
  "#5c6f68",
];

export function colorFor(index: number): string {
  return GLYPH_COLORS[index % GLYPH_COLORS.length];
}

function tracePath(ctx: Draw2D, points: ScreenPoint[], close = true) {
  ctx.beginPath();
  points.forEach((p, i) => (i === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
  if (close) ctx.closePath();
}

/**
 * Draw one radar glyph inside its projected quad. All glyph-local points
 * pass through the quad's corner mapping, so tilted shelf surfaces render
 * as skewed canvases.
 */
export function drawGlyphInQuad(
  ctx: Draw2D,
  quad: ScreenPoint[],
  axes: AxisValue[],
  color: string
): void {
  // quad outline
  tracePath(ctx, quad);
  ctx.globalAlpha = 0.9;
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.stroke();
  ctx.globalAlpha = 0.25;
  ctx.fillStyle = "#ffffff";
  ctx.fill();

  const spokes = axisEndpoints(axes.length, 0.46).map((p) => quadPoint(quad, p.x, p.y));
  const center = quadPoint(quad, 0.5, 0.5);
  ctx.globalAlpha = 0.5;
  ctx.lineWidth = 1;
  ctx.strokeStyle = "#5c5c5c";
  for (const tip of spokes) {
    ctx.beginPath();
    ctx.moveTo(center.x, center.y);
    ctx.lineTo(tip.x, tip.y);
    ctx.stroke();
  }
  tracePath(ctx, spokes);
  ctx.stroke();

  // the data polygon; missing axes pull to the center and are dotted below
  const values = axes.map((a) => (a.missing ? 0 : a.value));
  const polygon = radarVertices(values, 0.46).map((p) => quadPoint(quad, p.x, p.y));
  tracePath(ctx, polygon);
  ctx.globalAlpha = 0.45;
  ctx.fillStyle = color;
  ctx.fill();
  ctx.globalAlpha = 1;
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.stroke();

  for (const [i, p] of polygon.entries()) {
    if (axes[i].missing) continue;
    ctx.beginPath();
    ctx.arc(p.x, p.y, 2.5, 0, 2 * Math.PI);
    ctx.fillStyle = color;
    ctx.fill();
  }
}

export interface ComparisonSeries {
  values: number[];
  color: string;
}

/** Superposed radar polygons on one shared axis frame, flat (no quad). */
export function drawComparison(
  ctx: Draw2D,
  size: number,
  axisCount: number,
  series: ComparisonSeries[]
): void {
  const center = { x: size / 2, y: size / 2 };
  const radius = size * 0.38;

  ctx.globalAlpha = 0.6;
  ctx.strokeStyle = "#888888";
  ctx.lineWidth = 1;
  for (const ringScale of [0.5, 1.0]) {
    tracePath(ctx, radarVertices(new Array(axisCount).fill(ringScale), radius, center));
    ctx.stroke();
  }
  for (const tip of axisEndpoints(axisCount, radius, center)) {
    ctx.beginPath();
    ctx.moveTo(center.x, center.y);
    ctx.lineTo(tip.x, tip.y);
    ctx.stroke();
  }

  for (const s of series) {
    const polygon = radarVertices(s.values, radius, center);
    tracePath(ctx, polygon);
    ctx.globalAlpha = 0.3;
    ctx.fillStyle = s.color;
    ctx.fill();
    ctx.globalAlpha = 1;
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 2;
    ctx.stroke();
  }
}
