"""Situated glyph geometry: anchor quads, overlap resolution, radar polygons.

A glyph is anchored on a planar quad spanning the product's physical area.
The quad lives in the plane obtained by rotating the camera-facing plane by
the product's rotation, so perspective projection distorts glyphs on tilted
shelf surfaces naturally. Overlap between glyphs is measured on screen-space
axis-aligned bounding rectangles of the projected quads and resolved by
shrinking the worst pair in place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

from .catalog import AxisValue
from .errors import InvalidArgumentError
from .fusion import FusedProduct
from .geometry import CameraIntrinsics, ScreenPoint, Vec3, rotate_point, world_to_screen

Quad = tuple[Vec3, Vec3, Vec3, Vec3]

SHRINK_FACTOR = 0.9
SCALE_FLOOR = 0.5
DEFAULT_MAX_OVERLAP_RATIO = 0.1


@dataclass(frozen=True)
class GlyphSpec:
    """One product's glyph: anchor quad in world space plus axis values."""

    product_id: str
    anchor_quad: Quad
    axis_values: tuple[AxisValue, ...] = field(default=())
    scale_factor: float = 1.0
    visible: bool = True


class Rect(NamedTuple):
    """Screen-space axis-aligned rectangle."""

    min_x: float
    min_y: float
    max_x: float
    max_y: float

    @property
    def area(self) -> float:
        return max(0.0, self.max_x - self.min_x) * max(0.0, self.max_y - self.min_y)


@dataclass(frozen=True)
class RadarPolygon:
    center: tuple[float, float]
    vertices: tuple[tuple[float, float], ...]


def glyph_anchor(p: FusedProduct) -> Quad:
    """Planar quad centered on the product, spanning its physical size.

    Corners are ordered counter-clockwise as seen by the camera, starting at
    the top-left. Marker-derived rotations tilt the quad with the shelf
    surface; identity rotation (object-only products) faces the camera.
    """
    hw = p.pose.size.width / 2.0
    hh = p.pose.size.height / 2.0
    px, py, pz = p.pose.position
    corners = []
    for ox, oy in ((-hw, -hh), (-hw, hh), (hw, hh), (hw, -hh)):
        rx, ry, rz = rotate_point(p.pose.rotation, (ox, oy, 0.0))
        corners.append((px + rx, py + ry, pz + rz))
    return tuple(corners)


def project_quad(quad: Quad, k: CameraIntrinsics) -> tuple[ScreenPoint, ...]:
    return tuple(world_to_screen(c, k) for c in quad)


def screen_rect(quad: Quad, k: CameraIntrinsics) -> Rect:
    pts = project_quad(quad, k)
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    return Rect(min(xs), min(ys), max(xs), max(ys))


def intersection_area(a: Rect, b: Rect) -> float:
    w = min(a.max_x, b.max_x) - max(a.min_x, b.min_x)
    h = min(a.max_y, b.max_y) - max(a.min_y, b.min_y)
    return max(0.0, w) * max(0.0, h)


def overlap_ratio(a: Rect, b: Rect) -> float:
    """Intersection area over the smaller rectangle's area (0 when degenerate)."""
    smaller = min(a.area, b.area)
    if smaller <= 0.0:
        return 0.0
    return intersection_area(a, b) / smaller


def total_pairwise_overlap(rects: list[Rect]) -> float:
    """Sum of intersection areas over all rectangle pairs, in px^2."""
    total = 0.0
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            total += intersection_area(rects[i], rects[j])
    return total


def _quad_center(quad: Quad) -> Vec3:
    return (
        sum(c[0] for c in quad) / 4.0,
        sum(c[1] for c in quad) / 4.0,
        sum(c[2] for c in quad) / 4.0,
    )


def _scaled_quad(quad: Quad, scale: float) -> Quad:
    cx, cy, cz = _quad_center(quad)
    return tuple(
        (cx + (x - cx) * scale, cy + (y - cy) * scale, cz + (z - cz) * scale)
        for x, y, z in quad
    )


def resolve_overlaps(
    glyphs: list[GlyphSpec],
    k: CameraIntrinsics,
    max_overlap_ratio: float = DEFAULT_MAX_OVERLAP_RATIO,
    shrink_factor: float = SHRINK_FACTOR,
    scale_floor: float = SCALE_FLOOR,
) -> list[GlyphSpec]:
    """Shrink overlapping glyphs in place until every pair fits the budget.

    While any pair's projected-rectangle overlap ratio exceeds
    max_overlap_ratio, the worst offending pair (ties broken by product_id
    order) shrinks about its quad centers by shrink_factor, floored at
    scale_floor. Pairs with both members at the floor are terminal. Centers
    never move and scale factors never grow, so the pass is idempotent.
    """
    if not 0.0 <= max_overlap_ratio < 1.0:
        raise InvalidArgumentError(f"max_overlap_ratio must be in [0,1), got {max_overlap_ratio}")

    order = sorted(range(len(glyphs)), key=lambda i: (glyphs[i].product_id, i))
    scales = [g.scale_factor for g in glyphs]
    # Scaling applies to the quad as handed in; incoming scale_factor only
    # tracks shrink already applied upstream.
    base = [g.anchor_quad for g in glyphs]
    extra = [1.0 for _ in glyphs]

    def rect_of(i: int) -> Rect:
        return screen_rect(_scaled_quad(base[i], extra[i]), k)

    rects = [rect_of(i) for i in range(len(glyphs))]
    while True:
        worst: tuple[int, int] | None = None
        worst_ratio = max_overlap_ratio
        for a_pos in range(len(order)):
            for b_pos in range(a_pos + 1, len(order)):
                i, j = order[a_pos], order[b_pos]
                if scales[i] <= scale_floor and scales[j] <= scale_floor:
                    continue
                ratio = overlap_ratio(rects[i], rects[j])
                if ratio > worst_ratio:
                    worst, worst_ratio = (i, j), ratio
        if worst is None:
            break
        for i in worst:
            new_scale = max(scale_floor, scales[i] * shrink_factor)
            if new_scale < scales[i]:
                extra[i] *= new_scale / scales[i]
                scales[i] = new_scale
                rects[i] = rect_of(i)

    return [
        g
        if extra[i] == 1.0
        else replace(g, anchor_quad=_scaled_quad(base[i], extra[i]), scale_factor=scales[i])
        for i, g in enumerate(glyphs)
    ]


def radar_polygon(
    values: list[float],
    axis_count: int,
    radius: float,
    center: tuple[float, float] = (0.5, 0.5),
) -> RadarPolygon:
    """Vertices of a radar polygon: axis k at angle 2*pi*k/K - pi/2.

    Axis 0 points up (screen y grows downward, so "up" is angle -pi/2);
    vertex k sits at distance radius*values[k] from the center.
    """
    if axis_count < 3:
        raise InvalidArgumentError(f"a radar polygon needs >= 3 axes, got {axis_count}")
    if axis_count != len(values):
        raise InvalidArgumentError(f"expected {axis_count} values, got {len(values)}")
    if not radius > 0:
        raise InvalidArgumentError(f"radius must be > 0, got {radius}")
    cx, cy = center
    vertices = []
    for i, v in enumerate(values):
        theta = 2.0 * math.pi * i / axis_count - math.pi / 2.0
        vertices.append((cx + radius * v * math.cos(theta), cy + radius * v * math.sin(theta)))
    return RadarPolygon(center=center, vertices=tuple(vertices))
