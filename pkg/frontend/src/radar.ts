// Radar polygon geometry in a unit square, matching the engine's
// convention: axis k at angle 2*pi*k/K - pi/2, so axis 0 points up.

import type { ScreenPoint } from "./types";

export function radarVertices(
  values: number[],
  radius: number,
  center: ScreenPoint = { x: 0.5, y: 0.5 }
): ScreenPoint[] {
  const axisCount = values.length;
  return values.map((value, k) => {
    const theta = (2 * Math.PI * k) / axisCount - Math.PI / 2;
    return {
      x: center.x + radius * value * Math.cos(theta),
      y: center.y + radius * value * Math.sin(theta),
    };
  });
}

/** End points of the axis spokes (the value = 1 ring). */
export function axisEndpoints(
  axisCount: number,
  radius: number,
  center: ScreenPoint = { x: 0.5, y: 0.5 }
): ScreenPoint[] {
  return radarVertices(new Array(axisCount).fill(1), radius, center);
}

/**
 * Map a glyph-local unit-square point into a projected quad by bilinear
 * interpolation of the quad corners (top-left, bottom-left, bottom-right,
 * top-right). u runs left to right, v top to bottom.
 */
export function quadPoint(quad: ScreenPoint[], u: number, v: number): ScreenPoint {
  const [tl, bl, br, tr] = quad;
  const topX = tl.x + (tr.x - tl.x) * u;
  const topY = tl.y + (tr.y - tl.y) * u;
  const bottomX = bl.x + (br.x - bl.x) * u;
  const bottomY = bl.y + (br.y - bl.y) * u;
  return { x: topX + (bottomX - topX) * v, y: topY + (bottomY - topY) * v };
}
