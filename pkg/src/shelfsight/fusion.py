"""Per-product fusion of marker and object-detection observations.

Each product in a frame resolves to one of four cases:

1. marker + object  -> position/size from the object detection, rotation
   from the marker (the product's front face is parallel to its marker).
2. marker only      -> pose built entirely from the marker: world center
   plus a configured offset in the marker frame, size as a configured
   multiple of the marker's physical size.
3. object only      -> position/size from the detection at a configured
   default depth, identity rotation.
4. neither          -> the product does not exist in the scene.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import datetime

from .errors import DegenerateMarkerError, InvalidArgumentError
from .geometry import (
    IDENTITY_ROTATION,
    UNIT_NORM_TOL,
    CameraIntrinsics,
    Quaternion,
    ScreenPoint,
    Size,
    Vec3,
    WorldPose,
    marker_depth,
    rotate_point,
    screen_to_world,
)


class Provenance(str, enum.Enum):
    BOTH_SOURCES = "BothSources"
    MARKER_ONLY = "MarkerOnly"
    OBJECT_ONLY = "ObjectOnly"


@dataclass(frozen=True)
class MarkerObservation:
    """A decoded fiducial marker: ID, screen center, apparent size, orientation."""

    marker_id: str
    product_id: str
    screen_center: ScreenPoint
    apparent_size_px: float
    rotation: Quaternion
    physical_size_m: float

    def __post_init__(self):
        if not self.apparent_size_px > 0:
            raise DegenerateMarkerError(
                f"apparent_size_px must be > 0, got {self.apparent_size_px}"
            )
        if not self.physical_size_m > 0:
            raise InvalidArgumentError(f"physical_size_m must be > 0, got {self.physical_size_m}")
        if abs(self.rotation.norm() - 1.0) > UNIT_NORM_TOL:
            raise InvalidArgumentError(f"marker rotation must be unit, |q|={self.rotation.norm()}")


@dataclass(frozen=True)
class ObjectObservation:
    """An object-detector hit: product ID, screen center, bbox size, confidence."""

    product_id: str
    screen_center: ScreenPoint
    bbox_size_px: Size
    confidence: float

    def __post_init__(self):
        if not (self.bbox_size_px.width > 0 and self.bbox_size_px.height > 0):
            raise InvalidArgumentError(f"bbox size must be positive, got {self.bbox_size_px}")
        if not 0.0 <= self.confidence <= 1.0:
            raise InvalidArgumentError(f"confidence must be in [0,1], got {self.confidence}")


@dataclass(frozen=True)
class FusedProduct:
    product_id: str
    pose: WorldPose
    provenance: Provenance


@dataclass(frozen=True)
class FusionConfig:
    """Tunables for association and the marker-only / object-only cases.

    relative_offset is expressed in the marker frame in units of the
    marker's physical size; the default (0, -1, 0) puts the product one
    marker-length above the marker (+y points down).
    """

    relative_offset: Vec3 = (0.0, -1.0, 0.0)
    product_to_marker_scale: float = 4.0
    association_max_dist_m: float = 0.5
    min_confidence: float = 0.5
    default_product_depth_m: float = 1.0
    allow_id_mismatch: bool = False

    def __post_init__(self):
        if not self.product_to_marker_scale > 0:
            raise InvalidArgumentError("product_to_marker_scale must be > 0")
        if not self.association_max_dist_m > 0:
            raise InvalidArgumentError("association_max_dist_m must be > 0")
        if not 0.0 <= self.min_confidence <= 1.0:
            raise InvalidArgumentError("min_confidence must be in [0,1]")
        if not self.default_product_depth_m > 0:
            raise InvalidArgumentError("default_product_depth_m must be > 0")


@dataclass(frozen=True)
class SceneFrame:
    """One camera observation: intrinsics plus decoded marker and object hits."""

    frame_id: str
    timestamp: datetime
    intrinsics: CameraIntrinsics
    markers: tuple[MarkerObservation, ...] = field(default=())
    objects: tuple[ObjectObservation, ...] = field(default=())
    image_ref: str = ""


def marker_world_center(m: MarkerObservation, k: CameraIntrinsics) -> Vec3:
    """Marker center lifted to world coordinates at its recovered depth."""
    return screen_to_world(m.screen_center, marker_depth(m.physical_size_m, m.apparent_size_px, k), k)


def associate(
    m: MarkerObservation,
    objs: list[ObjectObservation],
    k: CameraIntrinsics,
    cfg: FusionConfig,
) -> ObjectObservation | None:
    """Pick the detection belonging to a marker: closest in world space.

    Detections are lifted to the marker's depth (the product is assumed to
    sit at the same distance from the camera as its marker) and compared by
    Euclidean world distance to the marker center. Only detections with
    confidence >= cfg.min_confidence, matching product_id (unless
    cfg.allow_id_mismatch) and within cfg.association_max_dist_m qualify.
    Ties break on lexicographically smallest product_id, then smallest
    screen x.
    """
    depth = marker_depth(m.physical_size_m, m.apparent_size_px, k)
    mx, my, mz = screen_to_world(m.screen_center, depth, k)
    best: ObjectObservation | None = None
    best_key: tuple[float, str, float] | None = None
    for o in objs:
        if o.confidence < cfg.min_confidence:
            continue
        if not cfg.allow_id_mismatch and o.product_id != m.product_id:
            continue
        ox, oy, oz = screen_to_world(o.screen_center, depth, k)
        dist = ((ox - mx) ** 2 + (oy - my) ** 2 + (oz - mz) ** 2) ** 0.5
        if dist > cfg.association_max_dist_m:
            continue
        key = (dist, o.product_id, o.screen_center.x)
        if best_key is None or key < best_key:
            best, best_key = o, key
    return best


def fuse_product(
    m: MarkerObservation | None,
    o: ObjectObservation | None,
    k: CameraIntrinsics,
    cfg: FusionConfig,
) -> FusedProduct | None:
    """Resolve one product's pose from whichever observations exist."""
    if m is None and o is None:
        return None

    if m is not None and o is not None:
        if m.product_id != o.product_id:
            raise InvalidArgumentError(
                f"marker product {m.product_id!r} does not match object product {o.product_id!r}"
            )
        depth = marker_depth(m.physical_size_m, m.apparent_size_px, k)
        position = screen_to_world(o.screen_center, depth, k)
        size = Size(
            o.bbox_size_px.width * depth / k.focal_length_px,
            o.bbox_size_px.height * depth / k.focal_length_px,
        )
        pose = WorldPose(position=position, rotation=m.rotation, size=size)
        return FusedProduct(m.product_id, pose, Provenance.BOTH_SOURCES)

    if m is not None:
        center = marker_world_center(m, k)
        ox, oy, oz = rotate_point(
            m.rotation,
            (
                cfg.relative_offset[0] * m.physical_size_m,
                cfg.relative_offset[1] * m.physical_size_m,
                cfg.relative_offset[2] * m.physical_size_m,
            ),
        )
        side = m.physical_size_m * cfg.product_to_marker_scale
        pose = WorldPose(
            position=(center[0] + ox, center[1] + oy, center[2] + oz),
            rotation=m.rotation,
            size=Size(side, side),
        )
        return FusedProduct(m.product_id, pose, Provenance.MARKER_ONLY)

    assert o is not None
    depth = cfg.default_product_depth_m
    position = screen_to_world(o.screen_center, depth, k)
    size = Size(
        o.bbox_size_px.width * depth / k.focal_length_px,
        o.bbox_size_px.height * depth / k.focal_length_px,
    )
    pose = WorldPose(position=position, rotation=IDENTITY_ROTATION, size=size)
    return FusedProduct(o.product_id, pose, Provenance.OBJECT_ONLY)


def fuse_frame(frame: SceneFrame, cfg: FusionConfig) -> list[FusedProduct]:
    """Fuse a whole frame into at most one product per product_id.

    Duplicate markers for one product keep the largest apparent size (the
    closest, most reliable read). Detections left unclaimed by every marker
    become object-only products, but only for product_ids no marker
    accounted for; among duplicates the most confident detection wins.
    Output is sorted by product_id.
    """
    k = frame.intrinsics

    markers_by_pid: dict[str, MarkerObservation] = {}
    for m in frame.markers:
        cur = markers_by_pid.get(m.product_id)
        if cur is None or (-m.apparent_size_px, m.marker_id) < (-cur.apparent_size_px, cur.marker_id):
            markers_by_pid[m.product_id] = m

    eligible = [o for o in frame.objects if o.confidence >= cfg.min_confidence]
    claimed: set[int] = set()
    fused: list[FusedProduct] = []

    for pid in sorted(markers_by_pid):
        m = markers_by_pid[pid]
        pool = [o for i, o in enumerate(eligible) if i not in claimed]
        match = associate(m, pool, k, cfg)
        if match is not None:
            claimed.add(next(i for i, o in enumerate(eligible) if o is match))
        result = fuse_product(m, match, k, cfg)
        assert result is not None
        fused.append(result)

    best_orphan: dict[str, tuple[tuple[float, float, float], ObjectObservation]] = {}
    for i, o in enumerate(eligible):
        if i in claimed or o.product_id in markers_by_pid:
            continue
        key = (-o.confidence, o.screen_center.x, o.screen_center.y)
        cur = best_orphan.get(o.product_id)
        if cur is None or key < cur[0]:
            best_orphan[o.product_id] = (key, o)

    for pid in sorted(best_orphan):
        result = fuse_product(None, best_orphan[pid][1], k, cfg)
        assert result is not None
        fused.append(result)

    fused.sort(key=lambda f: f.product_id)
    return fused
