"""Acceptance suite: one test per release criterion, each with a time budget.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS line per
criterion. Every tolerance is asserted here, not deferred to calibration.
"""

import json
import random
import time
from dataclasses import replace
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from shelfsight.catalog import feature_value, normalize
from shelfsight.cli import main
from shelfsight.fusion import (
    FusionConfig,
    Provenance,
    associate,
    fuse_frame,
    fuse_product,
)
from shelfsight.geometry import ScreenPoint, marker_depth, screen_to_world, world_to_screen
from shelfsight.layout import (
    GlyphSpec,
    glyph_anchor,
    overlap_ratio,
    resolve_overlaps,
    screen_rect,
    total_pairwise_overlap,
)
from shelfsight.service import create_app

from helpers import K, brute_force_associate, make_marker, make_object, random_quaternion

CFG = FusionConfig()


def _report(name: str, elapsed: float, budget: float):
    print(f"PASS {name} ({elapsed:.3f}s < {budget}s)")


def _tree(root: Path) -> dict:
    return {
        p.relative_to(root).as_posix(): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def test_fusion_truth_table_exhaustive():
    budget = 1.0
    start = time.perf_counter()
    rng = random.Random(101)
    for _ in range(200):
        m = make_marker(
            center=(rng.uniform(100, 1180), rng.uniform(100, 620)),
            apparent=rng.uniform(20, 120),
            physical=rng.uniform(0.02, 0.12),
            rotation=random_quaternion(rng),
        )
        o = make_object(
            center=(rng.uniform(100, 1180), rng.uniform(100, 620)),
            bbox=(rng.uniform(20, 300), rng.uniform(20, 300)),
            confidence=rng.uniform(0.5, 1.0),
        )

        assert fuse_product(None, None, K, CFG) is None

        marker_only = fuse_product(m, None, K, CFG)
        assert marker_only.provenance is Provenance.MARKER_ONLY
        assert marker_only.pose.rotation == m.rotation
        depth = marker_depth(m.physical_size_m, m.apparent_size_px, K)
        side = m.physical_size_m * CFG.product_to_marker_scale
        assert marker_only.pose.size == pytest.approx((side, side), rel=1e-12)
        assert marker_only.pose.position[2] == pytest.approx(
            depth + _offset_z(m), abs=1e-12
        )

        object_only = fuse_product(None, o, K, CFG)
        assert object_only.provenance is Provenance.OBJECT_ONLY
        assert object_only.pose.rotation == (1.0, 0.0, 0.0, 0.0)
        assert object_only.pose.position == pytest.approx(
            screen_to_world(o.screen_center, CFG.default_product_depth_m, K), abs=1e-12
        )

        both = fuse_product(m, o, K, CFG)
        assert both.provenance is Provenance.BOTH_SOURCES
        assert both.pose.rotation == m.rotation
        assert both.pose.position == pytest.approx(
            screen_to_world(o.screen_center, depth, K), abs=1e-12
        )
        assert both.pose.size == pytest.approx(
            (
                o.bbox_size_px.width * depth / K.focal_length_px,
                o.bbox_size_px.height * depth / K.focal_length_px,
            ),
            rel=1e-12,
        )
    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report("fusion truth table (4 cases x 200 randomized)", elapsed, budget)


def _offset_z(m):
    from shelfsight.geometry import rotate_point

    return rotate_point(
        m.rotation,
        (
            CFG.relative_offset[0] * m.physical_size_m,
            CFG.relative_offset[1] * m.physical_size_m,
            CFG.relative_offset[2] * m.physical_size_m,
        ),
    )[2]


def test_geometry_round_trip_and_depth_formula():
    budget = 1.0
    start = time.perf_counter()
    rng = random.Random(202)
    for _ in range(10_000):
        p = ScreenPoint(rng.uniform(0, K.image_size.width), rng.uniform(0, K.image_size.height))
        depth = rng.uniform(0.1, 10.0)
        q = world_to_screen(screen_to_world(p, depth, K), K)
        assert abs(q.x - p.x) < 1e-9
        assert abs(q.y - p.y) < 1e-9
    for _ in range(1_000):
        physical = rng.uniform(0.01, 0.2)
        apparent = rng.uniform(5.0, 500.0)
        expected = K.focal_length_px * physical / apparent
        assert abs(marker_depth(physical, apparent, K) - expected) < 1e-12
    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report("geometry round trip (10,000 pairs, <1e-9 px)", elapsed, budget)


def test_association_matches_brute_force_oracle():
    budget = 5.0
    start = time.perf_counter()
    rng = random.Random(303)
    pids = ["p1", "p2", "p3", "p4"]
    for i in range(1_000):
        cfg = FusionConfig(
            association_max_dist_m=rng.choice([0.1, 0.25, 0.5, 1.0]),
            min_confidence=rng.choice([0.0, 0.3, 0.5, 0.7]),
            allow_id_mismatch=rng.random() < 0.25,
        )
        pid = rng.choice(pids)
        m = make_marker(
            product_id=pid,
            center=(rng.uniform(200, 1080), rng.uniform(150, 570)),
            apparent=rng.uniform(20, 120),
            physical=rng.uniform(0.02, 0.12),
        )
        if i % 10 == 0:
            # mirrored detections at identical distance exercise the tie-break
            dx = rng.uniform(10, 200)
            objs = [
                make_object(product_id=pid, center=(m.screen_center.x - dx, m.screen_center.y)),
                make_object(product_id=pid, center=(m.screen_center.x + dx, m.screen_center.y)),
            ]
        else:
            objs = [
                make_object(
                    product_id=rng.choice(pids),
                    center=(rng.uniform(0, 1280), rng.uniform(0, 720)),
                    confidence=rng.choice([0.2, 0.45, 0.6, 0.9, 1.0]),
                )
                for _ in range(rng.randint(0, 10))
            ]
        assert associate(m, objs, K, cfg) is brute_force_associate(m, objs, K, cfg)
    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report("association vs brute-force oracle (1,000 scenes)", elapsed, budget)


def test_normalization_on_bundled_catalog(bundled_catalog):
    budget = 1.0
    start = time.perf_counter()
    by_type: dict[str, list] = {}
    for record in bundled_catalog.products:
        by_type.setdefault(record.product_type, []).append(record)
    assert len([t for t, rs in by_type.items() if len(rs) >= 5]) >= 3

    all_features = ["price", "rating", "review_count"] + sorted(
        {f for r in bundled_catalog.products for f in r.specs}
    )
    for ptype, records in by_type.items():
        scales = bundled_catalog.feature_scales(ptype, all_features)
        features = [s.feature for s in scales]
        by_feature = {s.feature: s for s in scales}
        for record in records:
            for axis in normalize(record, scales, features):
                assert 0.0 <= axis.value <= 1.0
                scale = by_feature[axis.feature]
                value = feature_value(record, axis.feature)
                if scale.min_value == scale.max_value:
                    assert axis.value == 0.5
                elif scale.direction == "desc":
                    # inverted: the smallest raw value scores 1.0
                    if value == scale.min_value:
                        assert axis.value == 1.0
                    if value == scale.max_value:
                        assert axis.value == 0.0
                else:
                    if value == scale.max_value:
                        assert axis.value == 1.0
                    if value == scale.min_value:
                        assert axis.value == 0.0

    # single-product type: every axis is degenerate
    yogurt = bundled_catalog.get("yog-001")
    scales = bundled_catalog.feature_scales("yogurt", all_features)
    for axis in normalize(yogurt, scales, [s.feature for s in scales]):
        assert axis.value == 0.5
    # constant feature across a populated type
    weight = {s.feature: s for s in bundled_catalog.feature_scales("cereal", ["weight_g"])}
    assert weight["weight_g"].min_value == weight["weight_g"].max_value

    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report("normalization on bundled catalog", elapsed, budget)


def test_dual_source_layout_beats_marker_only(shelf_frame):
    budget = 2.0
    start = time.perf_counter()
    k = shelf_frame.intrinsics

    fused = fuse_frame(shelf_frame, CFG)
    assert all(f.provenance is Provenance.BOTH_SOURCES for f in fused)
    marker_only = fuse_frame(replace(shelf_frame, objects=()), CFG)
    assert all(f.provenance is Provenance.MARKER_ONLY for f in marker_only)

    fused_total = total_pairwise_overlap([screen_rect(glyph_anchor(f), k) for f in fused])
    mo_total = total_pairwise_overlap([screen_rect(glyph_anchor(f), k) for f in marker_only])
    assert fused_total < mo_total
    assert (mo_total - fused_total) / mo_total >= 0.5

    for products in (fused, marker_only):
        glyphs = [GlyphSpec(f.product_id, glyph_anchor(f)) for f in products]
        resolved = resolve_overlaps(glyphs, k, max_overlap_ratio=0.1)
        rects = [screen_rect(g.anchor_quad, k) for g in resolved]
        for i in range(len(resolved)):
            for j in range(i + 1, len(resolved)):
                floored = resolved[i].scale_factor <= 0.5 and resolved[j].scale_factor <= 0.5
                assert overlap_ratio(rects[i], rects[j]) <= 0.1 + 1e-12 or floored

    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report(
        f"dual-source anchors cut glyph overlap ({mo_total:.0f} -> {fused_total:.0f} px^2)",
        elapsed,
        budget,
    )


def test_replay_determinism(catalog_path, fixtures_dir, tmp_path):
    budget = 5.0
    start = time.perf_counter()
    for name in ("shelf", "store"):
        a, b = tmp_path / f"{name}_a", tmp_path / f"{name}_b"
        args = ["replay", "--fixtures", str(fixtures_dir / name), "--catalog", str(catalog_path)]
        assert main([*args, "--out", str(a)]) == 0
        assert main([*args, "--out", str(b)]) == 0
        assert _tree(a) == _tree(b)
    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report("replay determinism (byte-identical trees)", elapsed, budget)


def test_api_contract_suite(bundled_catalog, shelf_frame_doc):
    budget = 10.0
    start = time.perf_counter()
    client = TestClient(create_app(bundled_catalog))

    # lifecycle
    sid = client.post("/sessions", json={}).json()["session_id"]
    overlay = client.post(f"/sessions/{sid}/frames", json=shelf_frame_doc).json()
    assert [g["product_id"] for g in overlay["glyphs"] if g["visible"]] == [
        "milk-001",
        "milk-002",
        "milk-003",
    ]

    # filter monotonicity: tightening never grows the visible set
    seen = None
    for lower in (None, 4.0, 8.0, 11.0, 20.0):
        ranges = {} if lower is None else {"protein_g": {"min": lower}}
        body = client.put(f"/sessions/{sid}/filter", json={"ranges": ranges}).json()
        visible = {g["product_id"] for g in body["glyphs"] if g["visible"]}
        if seen is not None:
            assert visible <= seen
        seen = visible
    client.put(f"/sessions/{sid}/filter", json={"ranges": {}})

    # favorites involution
    assert client.post(f"/sessions/{sid}/favorites/milk-002").json()["favorites"] == ["milk-002"]
    assert client.post(f"/sessions/{sid}/favorites/milk-002").json()["favorites"] == []
    client.post(f"/sessions/{sid}/favorites/milk-002")
    client.post(f"/sessions/{sid}/favorites/milk-003")

    # comparison shares scales and axis values with the overlay
    overlay = client.get(f"/sessions/{sid}/overlay").json()
    view = client.get(f"/sessions/{sid}/comparison").json()
    overlay_scales = {(s["product_type"], s["feature"]): s for s in overlay["scales"]}
    for scale in view["scales"]:
        key = (scale["product_type"], scale["feature"])
        if key in overlay_scales:
            assert scale == overlay_scales[key]
    for entry in view["entries"]:
        glyph = next(g for g in overlay["glyphs"] if g["product_id"] == entry["product_id"])
        overlay_axes = {a["feature"]: a["value"] for a in glyph["axis_values"]}
        for axis in entry["values"]:
            if axis["feature"] in overlay_axes:
                assert axis["value"] == overlay_axes[axis["feature"]]

    # coupons: deduped per session, only for active coupons of seen products
    second = json.loads(json.dumps(shelf_frame_doc))
    second["frame_id"] = "shelf-002"
    client.post(f"/sessions/{sid}/frames", json=second)
    r = client.get(f"/sessions/{sid}/coupons", params={"follow": "false"})
    events = [json.loads(line) for line in r.text.splitlines() if line]
    assert [e["coupon"]["coupon_id"] for e in events] == ["cpn-milk2-aug"]
    seen_products = {"milk-001", "milk-002", "milk-003"}
    assert all(e["coupon"]["product_id"] in seen_products for e in events)

    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report("API contract suite", elapsed, budget)
