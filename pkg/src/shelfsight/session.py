"""Stateful shopping sessions: frames in, filtered glyph overlays out.

A session owns a filter predicate, an ordered favorites list, the selected
radar axes and a glyph visibility toggle. Submitting a frame runs the full
pipeline (fuse -> catalog query -> filter -> normalize -> anchor -> overlap
resolution) and emits coupon events for newly seen products with active
deals. Sessions are independent; operations within one session serialize on
the session lock.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from typing import Mapping

from .catalog import (
    AxisValue,
    Catalog,
    Coupon,
    FeatureScale,
    ProductRecord,
    feature_value,
    normalize_value,
)
from .errors import EmptyComparisonError, InvalidArgumentError, NotFoundError
from .fusion import FusedProduct, FusionConfig, SceneFrame, fuse_frame
from .geometry import CameraIntrinsics
from .layout import (
    DEFAULT_MAX_OVERLAP_RATIO,
    SCALE_FLOOR,
    SHRINK_FACTOR,
    GlyphSpec,
    glyph_anchor,
    resolve_overlaps,
)

MIN_FEATURES = 3


@dataclass(frozen=True)
class RangeConstraint:
    lower: float | None = None
    upper: float | None = None

    def __post_init__(self):
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise InvalidArgumentError(f"range lower {self.lower} > upper {self.upper}")

    def contains(self, value: float) -> bool:
        if self.lower is not None and value < self.lower:
            return False
        if self.upper is not None and value > self.upper:
            return False
        return True


@dataclass(frozen=True)
class FilterPredicate:
    """Numeric ranges plus categorical constraints; empty passes everything."""

    ranges: Mapping[str, RangeConstraint] = field(default_factory=dict)
    brands: frozenset[str] | None = None
    product_types: frozenset[str] | None = None

    def passes(self, record: ProductRecord) -> bool:
        if self.brands is not None and record.brand not in self.brands:
            return False
        if self.product_types is not None and record.product_type not in self.product_types:
            return False
        for feature, constraint in self.ranges.items():
            value = feature_value(record, feature)
            # A record without the feature cannot satisfy a range on it.
            if value is None or not constraint.contains(value):
                return False
        return True


EMPTY_FILTER = FilterPredicate()


@dataclass(frozen=True)
class LayoutConfig:
    max_overlap_ratio: float = DEFAULT_MAX_OVERLAP_RATIO
    shrink_factor: float = SHRINK_FACTOR
    scale_floor: float = SCALE_FLOOR


@dataclass(frozen=True)
class EngineConfig:
    """Service-level defaults shared by all sessions and by batch replay."""

    features: tuple[str, ...] = ("price", "rating", "protein_g", "calories")
    fusion: FusionConfig = FusionConfig()
    layout: LayoutConfig = LayoutConfig()


@dataclass(frozen=True)
class OverlayResult:
    """Everything the UI needs to draw one frame's worth of glyphs."""

    frame_id: str | None
    glyphs: tuple[GlyphSpec, ...]
    fused: tuple[FusedProduct, ...]
    products: tuple[ProductRecord, ...]
    filtered_out: tuple[ProductRecord, ...]
    scales: tuple[FeatureScale, ...]
    features: tuple[str, ...]
    missing_ids: tuple[str, ...] = ()
    intrinsics: CameraIntrinsics | None = None
    image_ref: str = ""


@dataclass(frozen=True)
class CouponEvent:
    seq: int
    frame_id: str
    coupon: Coupon


@dataclass(frozen=True)
class ComparisonEntry:
    product_id: str
    name: str
    brand: str
    product_type: str
    values: tuple[AxisValue, ...]
    raw: Mapping[str, float | None]


@dataclass(frozen=True)
class ComparisonView:
    """Superposed radar polygons for the favorites, on one shared axis frame."""

    features: tuple[str, ...]
    entries: tuple[ComparisonEntry, ...]
    scales: tuple[FeatureScale, ...]


@dataclass
class Session:
    session_id: str
    selected_features: tuple[str, ...]
    filter: FilterPredicate = EMPTY_FILTER
    favorites: list[str] = field(default_factory=list)
    glyphs_enabled: bool = True
    last_frame: SceneFrame | None = None
    last_overlay: OverlayResult | None = None
    seen_frame_ids: set[str] = field(default_factory=set)
    seen_products: set[str] = field(default_factory=set)
    emitted_coupons: set[str] = field(default_factory=set)
    events: list[CouponEvent] = field(default_factory=list)
    lock: threading.RLock = field(default_factory=threading.RLock)
    events_changed: threading.Condition = field(default_factory=threading.Condition)


def _check_features(features: tuple[str, ...]) -> tuple[str, ...]:
    if len(features) < MIN_FEATURES:
        raise InvalidArgumentError(
            f"glyphs need at least {MIN_FEATURES} axes, got {len(features)}"
        )
    return features


class SessionManager:
    """Owns all sessions over one immutable catalog."""

    def __init__(self, catalog: Catalog, config: EngineConfig | None = None):
        self.catalog = catalog
        self.config = config or EngineConfig()
        _check_features(self.config.features)
        self._sessions: dict[str, Session] = {}
        self._registry_lock = threading.Lock()

    def create_session(self, features: list[str] | None = None) -> Session:
        selected = _check_features(tuple(features) if features else self.config.features)
        session = Session(session_id=uuid.uuid4().hex, selected_features=selected)
        with self._registry_lock:
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise NotFoundError(f"unknown session {session_id!r}")
        return session

    # -- frame pipeline ----------------------------------------------------

    def submit_frame(self, session_id: str, frame: SceneFrame) -> OverlayResult:
        session = self.get(session_id)
        with session.lock:
            if frame.frame_id in session.seen_frame_ids:
                raise InvalidArgumentError(
                    f"frame_id {frame.frame_id!r} already submitted in this session"
                )
            overlay = self._compute_overlay(session, frame)
            session.seen_frame_ids.add(frame.frame_id)
            session.last_frame = frame
            session.last_overlay = overlay
            self._emit_coupons(session, frame, overlay.fused)
            return overlay

    def _compute_overlay(self, session: Session, frame: SceneFrame) -> OverlayResult:
        fused = fuse_frame(frame, self.config.fusion)
        records, missing = self.catalog.query([f.product_id for f in fused])
        rec_by_id = {r.product_id: r for r in records}
        known = [f for f in fused if f.product_id in rec_by_id]
        features = session.selected_features

        scales: list[FeatureScale] = []
        scales_by_type: dict[str, dict[str, FeatureScale]] = {}
        for f in known:
            ptype = rec_by_id[f.product_id].product_type
            if ptype not in scales_by_type:
                type_scales = self.catalog.feature_scales(ptype, list(features))
                scales.extend(type_scales)
                scales_by_type[ptype] = {s.feature: s for s in type_scales}

        glyphs: list[GlyphSpec] = []
        passing: list[ProductRecord] = []
        failing: list[ProductRecord] = []
        for f in known:
            record = rec_by_id[f.product_id]
            ok = session.filter.passes(record)
            (passing if ok else failing).append(record)
            type_scales = scales_by_type[record.product_type]
            axes = tuple(
                normalize_value(feature_value(record, ft), type_scales[ft])
                if ft in type_scales
                else AxisValue(ft, 0.0, missing=True)
                for ft in features
            )
            glyphs.append(
                GlyphSpec(
                    product_id=f.product_id,
                    anchor_quad=glyph_anchor(f),
                    axis_values=axes,
                    visible=ok and session.glyphs_enabled,
                )
            )

        visible_idx = [i for i, g in enumerate(glyphs) if g.visible]
        resolved = resolve_overlaps(
            [glyphs[i] for i in visible_idx],
            frame.intrinsics,
            max_overlap_ratio=self.config.layout.max_overlap_ratio,
            shrink_factor=self.config.layout.shrink_factor,
            scale_floor=self.config.layout.scale_floor,
        )
        for pos, i in enumerate(visible_idx):
            glyphs[i] = resolved[pos]

        return OverlayResult(
            frame_id=frame.frame_id,
            glyphs=tuple(glyphs),
            fused=tuple(known),
            products=tuple(passing),
            filtered_out=tuple(failing),
            scales=tuple(scales),
            features=features,
            missing_ids=tuple(missing),
            intrinsics=frame.intrinsics,
            image_ref=frame.image_ref,
        )

    def _emit_coupons(
        self, session: Session, frame: SceneFrame, fused: tuple[FusedProduct, ...]
    ) -> None:
        pids = [f.product_id for f in fused]
        session.seen_products.update(pids)
        active = self.catalog.active_coupons(pids, frame.timestamp)
        fresh = [
            c
            for c in sorted(active, key=lambda c: (c.product_id, c.coupon_id))
            if c.coupon_id not in session.emitted_coupons
        ]
        if not fresh:
            return
        with session.events_changed:
            for coupon in fresh:
                session.emitted_coupons.add(coupon.coupon_id)
                session.events.append(
                    CouponEvent(seq=len(session.events) + 1, frame_id=frame.frame_id, coupon=coupon)
                )
            session.events_changed.notify_all()

    def _recompute(self, session: Session) -> OverlayResult:
        if session.last_frame is None:
            return self._empty_overlay(session)
        overlay = self._compute_overlay(session, session.last_frame)
        session.last_overlay = overlay
        return overlay

    def _empty_overlay(self, session: Session) -> OverlayResult:
        return OverlayResult(
            frame_id=None,
            glyphs=(),
            fused=(),
            products=(),
            filtered_out=(),
            scales=(),
            features=session.selected_features,
        )

    # -- interaction -------------------------------------------------------

    def overlay(self, session_id: str) -> OverlayResult:
        session = self.get(session_id)
        with session.lock:
            return session.last_overlay or self._empty_overlay(session)

    def set_filter(self, session_id: str, predicate: FilterPredicate) -> OverlayResult:
        session = self.get(session_id)
        with session.lock:
            session.filter = predicate
            return self._recompute(session)

    def toggle_glyphs(self, session_id: str, enabled: bool) -> OverlayResult:
        session = self.get(session_id)
        with session.lock:
            session.glyphs_enabled = enabled
            return self._recompute(session)

    def select_features(self, session_id: str, features: list[str]) -> OverlayResult:
        session = self.get(session_id)
        with session.lock:
            session.selected_features = _check_features(tuple(features))
            return self._recompute(session)

    def toggle_favorite(self, session_id: str, product_id: str) -> list[str]:
        session = self.get(session_id)
        if self.catalog.get(product_id) is None:
            raise NotFoundError(f"unknown product {product_id!r}")
        with session.lock:
            if product_id in session.favorites:
                session.favorites.remove(product_id)
            else:
                session.favorites.append(product_id)
            return list(session.favorites)

    def comparison_view(self, session_id: str) -> ComparisonView:
        session = self.get(session_id)
        with session.lock:
            if not session.favorites:
                raise EmptyComparisonError("add at least one favorite to compare")
            features = session.selected_features
            if "rating" not in features:
                features = features + ("rating",)
            records, _ = self.catalog.query(list(session.favorites))

            scales: list[FeatureScale] = []
            scales_by_type: dict[str, dict[str, FeatureScale]] = {}
            for record in records:
                if record.product_type not in scales_by_type:
                    type_scales = self.catalog.feature_scales(record.product_type, list(features))
                    scales.extend(type_scales)
                    scales_by_type[record.product_type] = {s.feature: s for s in type_scales}

            entries = []
            for record in records:
                type_scales = scales_by_type[record.product_type]
                values = tuple(
                    normalize_value(feature_value(record, ft), type_scales[ft])
                    if ft in type_scales
                    else AxisValue(ft, 0.0, missing=True)
                    for ft in features
                )
                entries.append(
                    ComparisonEntry(
                        product_id=record.product_id,
                        name=record.name,
                        brand=record.brand,
                        product_type=record.product_type,
                        values=values,
                        raw={ft: feature_value(record, ft) for ft in features},
                    )
                )
            return ComparisonView(features=features, entries=tuple(entries), scales=tuple(scales))

    # -- coupon event stream -----------------------------------------------

    def coupon_events(self, session_id: str, since: int = 0) -> list[CouponEvent]:
        """Events with seq > since, in emission order."""
        session = self.get(session_id)
        with session.events_changed:
            return [e for e in session.events if e.seq > since]

    def wait_for_events(self, session_id: str, since: int, timeout: float) -> list[CouponEvent]:
        """Block up to timeout seconds for events with seq > since."""
        session = self.get(session_id)
        with session.events_changed:
            if not any(e.seq > since for e in session.events):
                session.events_changed.wait(timeout)
            return [e for e in session.events if e.seq > since]
