"""Wire formats: JSON parsing for frames/filters/configs, overlay serialization.

Everything the HTTP API and the fixture replay tool read or write goes
through this module, so both surfaces share one schema. Serialization is
canonical (sorted keys, fixed indentation) to keep replay output
byte-identical across runs.
"""

from __future__ import annotations

import json
from typing import Any

from .catalog import Coupon, FeatureScale, ProductRecord
from .errors import InvalidArgumentError, SchemaError
from .fusion import (
    FusionConfig,
    MarkerObservation,
    ObjectObservation,
    Provenance,
    SceneFrame,
)
from .geometry import CameraIntrinsics, Quaternion, ScreenPoint, Size
from .layout import GlyphSpec, project_quad, screen_rect
from .session import (
    ComparisonView,
    CouponEvent,
    EngineConfig,
    FilterPredicate,
    LayoutConfig,
    OverlayResult,
    RangeConstraint,
    Session,
)
from .validation import (
    get_bool,
    get_list,
    get_number,
    get_obj,
    get_str,
    iso_utc,
    parse_timestamp,
)


def dumps_canonical(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dumps_line(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


# -- parsing ----------------------------------------------------------------


def _point(doc: dict, key: str, path: str) -> ScreenPoint:
    obj = get_obj(doc, key, path)
    p = f"{path}.{key}"
    return ScreenPoint(get_number(obj, "x", p), get_number(obj, "y", p))


def _size(doc: dict, key: str, path: str) -> Size:
    obj = get_obj(doc, key, path)
    p = f"{path}.{key}"
    return Size(get_number(obj, "width", p), get_number(obj, "height", p))


def _quaternion(doc: dict, key: str, path: str) -> Quaternion:
    obj = get_obj(doc, key, path)
    p = f"{path}.{key}"
    return Quaternion(
        get_number(obj, "w", p),
        get_number(obj, "x", p),
        get_number(obj, "y", p),
        get_number(obj, "z", p),
    )


def parse_intrinsics(doc: dict, path: str) -> CameraIntrinsics:
    try:
        return CameraIntrinsics(
            focal_length_px=get_number(doc, "focal_length_px", path),
            principal_point=_point(doc, "principal_point", path),
            image_size=_size(doc, "image_size", path),
        )
    except InvalidArgumentError as e:
        raise SchemaError(path, str(e)) from e


def parse_scene_frame(doc: Any, path: str = "frame") -> SceneFrame:
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected a JSON object")
    intrinsics = parse_intrinsics(get_obj(doc, "intrinsics", path), f"{path}.intrinsics")

    markers = []
    for i, raw in enumerate(get_list(doc, "markers", path, default=[])):
        p = f"{path}.markers[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError(p, "expected object")
        try:
            markers.append(
                MarkerObservation(
                    marker_id=get_str(raw, "marker_id", p),
                    product_id=get_str(raw, "product_id", p),
                    screen_center=_point(raw, "screen_center", p),
                    apparent_size_px=get_number(raw, "apparent_size_px", p),
                    rotation=_quaternion(raw, "rotation", p),
                    physical_size_m=get_number(raw, "physical_size_m", p),
                )
            )
        except InvalidArgumentError as e:
            raise SchemaError(p, str(e)) from e

    objects = []
    for i, raw in enumerate(get_list(doc, "objects", path, default=[])):
        p = f"{path}.objects[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError(p, "expected object")
        try:
            objects.append(
                ObjectObservation(
                    product_id=get_str(raw, "product_id", p),
                    screen_center=_point(raw, "screen_center", p),
                    bbox_size_px=_size(raw, "bbox_size_px", p),
                    confidence=get_number(raw, "confidence", p),
                )
            )
        except InvalidArgumentError as e:
            raise SchemaError(p, str(e)) from e

    return SceneFrame(
        frame_id=get_str(doc, "frame_id", path),
        timestamp=parse_timestamp(doc, "timestamp", path),
        intrinsics=intrinsics,
        markers=tuple(markers),
        objects=tuple(objects),
        image_ref=get_str(doc, "image_ref", path, default=""),
    )


def parse_filter(doc: Any, path: str = "filter") -> FilterPredicate:
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected a JSON object")
    ranges: dict[str, RangeConstraint] = {}
    raw_ranges = get_obj(doc, "ranges", path) if "ranges" in doc else {}
    for feature, raw in raw_ranges.items():
        p = f"{path}.ranges.{feature}"
        if not isinstance(raw, dict):
            raise SchemaError(p, "expected object with min/max")
        lower = get_number(raw, "min", p) if "min" in raw and raw["min"] is not None else None
        upper = get_number(raw, "max", p) if "max" in raw and raw["max"] is not None else None
        try:
            ranges[feature] = RangeConstraint(lower, upper)
        except InvalidArgumentError as e:
            raise SchemaError(p, str(e)) from e

    brands = None
    if doc.get("brands") is not None:
        brands = frozenset(str(b) for b in get_list(doc, "brands", path))
    product_types = None
    if doc.get("product_types") is not None:
        product_types = frozenset(str(t) for t in get_list(doc, "product_types", path))
    return FilterPredicate(ranges=ranges, brands=brands, product_types=product_types)


def parse_engine_config(doc: Any, path: str = "config") -> EngineConfig:
    """Engine config document; every field optional, defaults documented."""
    if doc is None:
        return EngineConfig()
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected a JSON object")
    defaults = EngineConfig()

    features = defaults.features
    if "features" in doc:
        features = tuple(str(f) for f in get_list(doc, "features", path))

    fusion = defaults.fusion
    if "fusion" in doc:
        raw = get_obj(doc, "fusion", path)
        p = f"{path}.fusion"
        offset = fusion.relative_offset
        if "relative_offset" in raw:
            triple = get_list(raw, "relative_offset", p)
            if len(triple) != 3 or not all(isinstance(v, (int, float)) for v in triple):
                raise SchemaError(f"{p}.relative_offset", "expected [x, y, z]")
            offset = (float(triple[0]), float(triple[1]), float(triple[2]))
        try:
            fusion = FusionConfig(
                relative_offset=offset,
                product_to_marker_scale=get_number(
                    raw, "product_to_marker_scale", p, default=fusion.product_to_marker_scale
                ),
                association_max_dist_m=get_number(
                    raw, "association_max_dist_m", p, default=fusion.association_max_dist_m
                ),
                min_confidence=get_number(raw, "min_confidence", p, default=fusion.min_confidence),
                default_product_depth_m=get_number(
                    raw, "default_product_depth_m", p, default=fusion.default_product_depth_m
                ),
                allow_id_mismatch=get_bool(
                    raw, "allow_id_mismatch", p, default=fusion.allow_id_mismatch
                ),
            )
        except InvalidArgumentError as e:
            raise SchemaError(p, str(e)) from e

    layout = defaults.layout
    if "layout" in doc:
        raw = get_obj(doc, "layout", path)
        p = f"{path}.layout"
        layout = LayoutConfig(
            max_overlap_ratio=get_number(raw, "max_overlap_ratio", p, default=layout.max_overlap_ratio),
            shrink_factor=get_number(raw, "shrink_factor", p, default=layout.shrink_factor),
            scale_floor=get_number(raw, "scale_floor", p, default=layout.scale_floor),
        )

    config = EngineConfig(features=features, fusion=fusion, layout=layout)
    if len(config.features) < 3:
        raise SchemaError(f"{path}.features", "at least 3 features required")
    return config


# -- serialization ----------------------------------------------------------


def record_to_dict(r: ProductRecord) -> dict:
    return {
        "product_id": r.product_id,
        "name": r.name,
        "brand": r.brand,
        "product_type": r.product_type,
        "price": r.price,
        "rating": r.rating,
        "review_count": r.review_count,
        "specs": {
            name: {"value": s.value, "unit": s.unit, "direction": s.direction}
            for name, s in sorted(r.specs.items())
        },
    }


def coupon_to_dict(c: Coupon) -> dict:
    return {
        "coupon_id": c.coupon_id,
        "product_id": c.product_id,
        "description": c.description,
        "discount": c.discount,
        "valid_from": iso_utc(c.valid_from),
        "valid_until": iso_utc(c.valid_until),
    }


def scale_to_dict(s: FeatureScale) -> dict:
    return {
        "product_type": s.product_type,
        "feature": s.feature,
        "min_value": s.min_value,
        "max_value": s.max_value,
        "direction": s.direction,
    }


def glyph_to_dict(g: GlyphSpec, provenance: Provenance, k: CameraIntrinsics) -> dict:
    quad = project_quad(g.anchor_quad, k)
    rect = screen_rect(g.anchor_quad, k)
    return {
        "product_id": g.product_id,
        "provenance": provenance.value,
        "visible": g.visible,
        "scale_factor": g.scale_factor,
        "anchor_quad": [{"x": x, "y": y, "z": z} for x, y, z in g.anchor_quad],
        "screen_quad": [{"x": p.x, "y": p.y} for p in quad],
        "screen_rect": {
            "min_x": rect.min_x,
            "min_y": rect.min_y,
            "max_x": rect.max_x,
            "max_y": rect.max_y,
        },
        "axis_values": [
            {"feature": a.feature, "value": a.value, "missing": a.missing}
            for a in g.axis_values
        ],
    }


def overlay_to_dict(overlay: OverlayResult) -> dict:
    provenance = {f.product_id: f.provenance for f in overlay.fused}
    glyphs = []
    if overlay.intrinsics is not None:
        glyphs = [
            glyph_to_dict(g, provenance[g.product_id], overlay.intrinsics)
            for g in overlay.glyphs
        ]
    return {
        "frame_id": overlay.frame_id,
        "image_ref": overlay.image_ref,
        "features": list(overlay.features),
        "glyphs": glyphs,
        "products": [record_to_dict(r) for r in overlay.products],
        "filtered_out": [record_to_dict(r) for r in overlay.filtered_out],
        "scales": [scale_to_dict(s) for s in overlay.scales],
        "missing_ids": list(overlay.missing_ids),
    }


def comparison_to_dict(view: ComparisonView) -> dict:
    return {
        "features": list(view.features),
        "entries": [
            {
                "product_id": e.product_id,
                "name": e.name,
                "brand": e.brand,
                "product_type": e.product_type,
                "values": [
                    {"feature": a.feature, "value": a.value, "missing": a.missing}
                    for a in e.values
                ],
                "raw": dict(e.raw),
            }
            for e in view.entries
        ],
        "scales": [scale_to_dict(s) for s in view.scales],
    }


def event_to_dict(e: CouponEvent) -> dict:
    return {"seq": e.seq, "frame_id": e.frame_id, "coupon": coupon_to_dict(e.coupon)}


def session_to_dict(s: Session) -> dict:
    return {
        "session_id": s.session_id,
        "features": list(s.selected_features),
        "glyphs_enabled": s.glyphs_enabled,
        "favorites": list(s.favorites),
    }
