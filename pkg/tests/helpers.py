"""Builders and independent oracles shared across test modules."""

from __future__ import annotations

import math
import random
from datetime import datetime, timezone

from shelfsight.fusion import (
    FusionConfig,
    MarkerObservation,
    ObjectObservation,
    SceneFrame,
)
from shelfsight.geometry import (
    IDENTITY_ROTATION,
    CameraIntrinsics,
    Quaternion,
    ScreenPoint,
    Size,
)

K = CameraIntrinsics(
    focal_length_px=1000.0,
    principal_point=ScreenPoint(640.0, 360.0),
    image_size=Size(1280.0, 720.0),
)

TS = datetime(2026, 8, 5, 10, 0, 0, tzinfo=timezone.utc)


def make_marker(
    product_id="p1",
    marker_id="m1",
    center=(640.0, 360.0),
    apparent=50.0,
    physical=0.05,
    rotation=IDENTITY_ROTATION,
) -> MarkerObservation:
    return MarkerObservation(
        marker_id=marker_id,
        product_id=product_id,
        screen_center=ScreenPoint(*center),
        apparent_size_px=apparent,
        rotation=rotation,
        physical_size_m=physical,
    )


def make_object(
    product_id="p1", center=(640.0, 360.0), bbox=(100.0, 150.0), confidence=0.9
) -> ObjectObservation:
    return ObjectObservation(
        product_id=product_id,
        screen_center=ScreenPoint(*center),
        bbox_size_px=Size(*bbox),
        confidence=confidence,
    )


def make_frame(markers=(), objects=(), frame_id="f1", k=K, ts=TS) -> SceneFrame:
    return SceneFrame(
        frame_id=frame_id,
        timestamp=ts,
        intrinsics=k,
        markers=tuple(markers),
        objects=tuple(objects),
    )


def random_quaternion(rng: random.Random) -> Quaternion:
    # Uniform over SO(3) via four gaussians, normalized.
    q = [rng.gauss(0.0, 1.0) for _ in range(4)]
    n = math.sqrt(sum(v * v for v in q))
    return Quaternion(*(v / n for v in q))


def brute_force_associate(
    m: MarkerObservation,
    objs: list[ObjectObservation],
    k: CameraIntrinsics,
    cfg: FusionConfig,
) -> ObjectObservation | None:
    """Exhaustive reference for association, computed from raw formulas."""
    f = k.focal_length_px
    cx, cy = k.principal_point
    depth = f * m.physical_size_m / m.apparent_size_px
    mx = (m.screen_center.x - cx) * depth / f
    my = (m.screen_center.y - cy) * depth / f
    candidates = []
    for o in objs:
        if o.confidence < cfg.min_confidence:
            continue
        if not cfg.allow_id_mismatch and o.product_id != m.product_id:
            continue
        ox = (o.screen_center.x - cx) * depth / f
        oy = (o.screen_center.y - cy) * depth / f
        d = math.hypot(ox - mx, oy - my)
        if d <= cfg.association_max_dist_m:
            candidates.append(((d, o.product_id, o.screen_center.x), o))
    if not candidates:
        return None
    return min(candidates, key=lambda c: c[0])[1]
