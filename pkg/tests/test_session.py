from dataclasses import replace

import pytest

from shelfsight.errors import (
    EmptyComparisonError,
    InvalidArgumentError,
    NotFoundError,
)
from shelfsight.session import (
    EngineConfig,
    FilterPredicate,
    RangeConstraint,
    SessionManager,
)
from shelfsight.wire import overlay_to_dict

from helpers import make_frame


@pytest.fixture
def manager(bundled_catalog):
    return SessionManager(bundled_catalog)


@pytest.fixture
def session(manager):
    return manager.create_session()


def _visible_ids(overlay):
    return [g.product_id for g in overlay.glyphs if g.visible]


# -- lifecycle ---------------------------------------------------------------


def test_create_session_defaults(session):
    assert session.favorites == []
    assert session.glyphs_enabled
    assert len(session.selected_features) >= 3


def test_create_sessions_distinct(manager):
    a = manager.create_session()
    b = manager.create_session()
    assert a.session_id != b.session_id


def test_create_session_rejects_too_few_features(manager):
    with pytest.raises(InvalidArgumentError):
        manager.create_session(["price", "rating"])


def test_unknown_session_not_found(manager, shelf_frame):
    with pytest.raises(NotFoundError):
        manager.submit_frame("nope", shelf_frame)
    with pytest.raises(NotFoundError):
        manager.overlay("nope")


# -- submit_frame ------------------------------------------------------------


def test_empty_frame_empty_overlay(manager, session):
    overlay = manager.submit_frame(session.session_id, make_frame(frame_id="empty"))
    assert overlay.glyphs == ()
    assert overlay.products == ()
    assert overlay.frame_id == "empty"


def test_shelf_frame_three_visible(manager, session, shelf_frame):
    overlay = manager.submit_frame(session.session_id, shelf_frame)
    assert _visible_ids(overlay) == ["milk-001", "milk-002", "milk-003"]
    assert [p.product_id for p in overlay.products] == ["milk-001", "milk-002", "milk-003"]
    assert overlay.filtered_out == ()
    assert overlay.missing_ids == ()


def test_duplicate_frame_id_rejected(manager, session, shelf_frame):
    manager.submit_frame(session.session_id, shelf_frame)
    with pytest.raises(InvalidArgumentError):
        manager.submit_frame(session.session_id, shelf_frame)


def test_overlay_deterministic_across_sessions(manager, shelf_frame):
    s1 = manager.create_session()
    s2 = manager.create_session()
    o1 = manager.submit_frame(s1.session_id, shelf_frame)
    o2 = manager.submit_frame(s2.session_id, shelf_frame)
    assert overlay_to_dict(o1) == overlay_to_dict(o2)


def test_unknown_product_listed_not_crashed(manager, session, shelf_frame):
    frame = replace(
        shelf_frame,
        frame_id="ghost",
        objects=shelf_frame.objects
        + (replace(shelf_frame.objects[0], product_id="ghost-product"),),
    )
    overlay = manager.submit_frame(session.session_id, frame)
    assert overlay.missing_ids == ("ghost-product",)
    assert "ghost-product" not in [g.product_id for g in overlay.glyphs]


# -- filtering ---------------------------------------------------------------


def test_empty_filter_passes_everything(manager, session, shelf_frame):
    manager.submit_frame(session.session_id, shelf_frame)
    overlay = manager.set_filter(session.session_id, FilterPredicate())
    assert len(_visible_ids(overlay)) == 3


def test_filter_before_any_frame_returns_empty_overlay(manager, session):
    overlay = manager.set_filter(session.session_id, FilterPredicate())
    assert overlay.frame_id is None
    assert overlay.glyphs == ()


def test_price_range_excluding_all(manager, session, shelf_frame):
    manager.submit_frame(session.session_id, shelf_frame)
    predicate = FilterPredicate(ranges={"price": RangeConstraint(upper=1.0)})
    overlay = manager.set_filter(session.session_id, predicate)
    assert _visible_ids(overlay) == []
    assert [p.product_id for p in overlay.filtered_out] == ["milk-001", "milk-002", "milk-003"]


def test_protein_floor_keeps_two_of_three_milks(manager, session, shelf_frame):
    # shelf milks carry protein 3 / 8 / 12
    manager.submit_frame(session.session_id, shelf_frame)
    predicate = FilterPredicate(ranges={"protein_g": RangeConstraint(lower=8.0)})
    overlay = manager.set_filter(session.session_id, predicate)
    assert _visible_ids(overlay) == ["milk-002", "milk-003"]
    assert [p.product_id for p in overlay.filtered_out] == ["milk-001"]


def test_brand_constraint(manager, session, shelf_frame):
    manager.submit_frame(session.session_id, shelf_frame)
    overlay = manager.set_filter(session.session_id, FilterPredicate(brands=frozenset({"ProMoo"})))
    assert _visible_ids(overlay) == ["milk-003"]


def test_invalid_range_rejected():
    with pytest.raises(InvalidArgumentError):
        RangeConstraint(lower=5.0, upper=1.0)


def test_filter_monotone_tightening(manager, session, shelf_frame):
    manager.submit_frame(session.session_id, shelf_frame)
    seen = set(_visible_ids(manager.set_filter(session.session_id, FilterPredicate())))
    for lower in (2.0, 5.0, 9.0, 13.0):
        predicate = FilterPredicate(ranges={"protein_g": RangeConstraint(lower=lower)})
        now = set(_visible_ids(manager.set_filter(session.session_id, predicate)))
        assert now <= seen
        seen = now


def test_visible_glyphs_all_pass_filter(manager, session, shelf_frame):
    manager.submit_frame(session.session_id, shelf_frame)
    predicate = FilterPredicate(ranges={"calories": RangeConstraint(upper=130.0)})
    overlay = manager.set_filter(session.session_id, predicate)
    passing = {p.product_id for p in overlay.products}
    assert set(_visible_ids(overlay)) == passing
    assert passing | {p.product_id for p in overlay.filtered_out} == {
        f.product_id for f in overlay.fused
    }


# -- glyph toggle and feature selection --------------------------------------


def test_toggle_glyphs_off_hides_all_keeps_products(manager, session, shelf_frame):
    manager.submit_frame(session.session_id, shelf_frame)
    overlay = manager.toggle_glyphs(session.session_id, False)
    assert _visible_ids(overlay) == []
    assert [p.product_id for p in overlay.products] == ["milk-001", "milk-002", "milk-003"]


def test_toggle_glyphs_involution(manager, session, shelf_frame):
    before = overlay_to_dict(manager.submit_frame(session.session_id, shelf_frame))
    manager.toggle_glyphs(session.session_id, False)
    after = overlay_to_dict(manager.toggle_glyphs(session.session_id, True))
    assert after == before


def test_select_four_features_yields_four_axes(manager, session, shelf_frame):
    manager.submit_frame(session.session_id, shelf_frame)
    overlay = manager.select_features(
        session.session_id, ["price", "rating", "protein_g", "calcium_mg"]
    )
    assert all(len(g.axis_values) == 4 for g in overlay.glyphs)
    assert overlay.features == ("price", "rating", "protein_g", "calcium_mg")


def test_select_too_few_features_rejected(manager, session):
    with pytest.raises(InvalidArgumentError):
        manager.select_features(session.session_id, ["price", "rating"])


def test_feature_without_type_scale_marked_missing(manager, session, shelf_frame):
    overlay = manager.submit_frame(session.session_id, shelf_frame)
    manager.select_features(session.session_id, ["price", "rating", "warp_drive"])
    overlay = manager.overlay(session.session_id)
    for g in overlay.glyphs:
        axis = {a.feature: a for a in g.axis_values}["warp_drive"]
        assert axis.missing and axis.value == 0.0


# -- favorites ---------------------------------------------------------------


def test_favorite_toggle_appends(manager, session):
    assert manager.toggle_favorite(session.session_id, "milk-002") == ["milk-002"]
    assert manager.toggle_favorite(session.session_id, "milk-001") == ["milk-002", "milk-001"]


def test_favorite_toggle_involution(manager, session):
    manager.toggle_favorite(session.session_id, "milk-002")
    manager.toggle_favorite(session.session_id, "milk-002")
    assert manager.get(session.session_id).favorites == []


def test_favorite_never_duplicates(manager, session):
    for _ in range(5):
        manager.toggle_favorite(session.session_id, "milk-002")
    favorites = manager.get(session.session_id).favorites
    assert favorites in ([], ["milk-002"])
    assert len(favorites) == len(set(favorites))


def test_favorite_unknown_product(manager, session):
    with pytest.raises(NotFoundError):
        manager.toggle_favorite(session.session_id, "nope")


# -- comparison view ---------------------------------------------------------


def test_comparison_requires_favorites(manager, session):
    with pytest.raises(EmptyComparisonError):
        manager.comparison_view(session.session_id)


def test_comparison_single_favorite(manager, session):
    manager.toggle_favorite(session.session_id, "milk-002")
    view = manager.comparison_view(session.session_id)
    assert [e.product_id for e in view.entries] == ["milk-002"]
    assert "rating" in view.features


def test_comparison_shared_axis_frame(manager, session):
    manager.toggle_favorite(session.session_id, "milk-001")
    manager.toggle_favorite(session.session_id, "milk-003")
    view = manager.comparison_view(session.session_id)
    assert len(view.entries) == 2
    assert [a.feature for a in view.entries[0].values] == list(view.features)
    assert [a.feature for a in view.entries[1].values] == list(view.features)


def test_comparison_price_max_with_desc_direction_is_zero(manager, session):
    manager.toggle_favorite(session.session_id, "milk-003")  # priciest milk
    view = manager.comparison_view(session.session_id)
    price = {a.feature: a for a in view.entries[0].values}["price"]
    assert price.value == 0.0


def test_comparison_shares_scales_with_overlay(manager, session, shelf_frame):
    overlay = manager.submit_frame(session.session_id, shelf_frame)
    manager.toggle_favorite(session.session_id, "milk-002")
    view = manager.comparison_view(session.session_id)
    overlay_scales = {(s.product_type, s.feature): s for s in overlay.scales}
    for scale in view.scales:
        key = (scale.product_type, scale.feature)
        if key in overlay_scales:
            assert overlay_scales[key] == scale
    # axis values agree between main view and comparison
    glyph = {g.product_id: g for g in overlay.glyphs}["milk-002"]
    entry = view.entries[0]
    overlay_axes = {a.feature: a.value for a in glyph.axis_values}
    for axis in entry.values:
        if axis.feature in overlay_axes:
            assert axis.value == overlay_axes[axis.feature]


def test_comparison_rating_not_duplicated(manager, bundled_catalog):
    session = manager.create_session(["rating", "price", "protein_g"])
    manager.toggle_favorite(session.session_id, "milk-002")
    view = manager.comparison_view(session.session_id)
    assert list(view.features).count("rating") == 1


# -- coupon events -----------------------------------------------------------


def test_no_frames_no_events(manager, session):
    assert manager.coupon_events(session.session_id) == []


def test_active_coupon_emitted_once_per_session(manager, session, shelf_frame):
    manager.submit_frame(session.session_id, shelf_frame)
    events = manager.coupon_events(session.session_id)
    assert [e.coupon.coupon_id for e in events] == ["cpn-milk2-aug"]

    again = replace(shelf_frame, frame_id="shelf-002")
    manager.submit_frame(session.session_id, again)
    events = manager.coupon_events(session.session_id)
    assert [e.coupon.coupon_id for e in events] == ["cpn-milk2-aug"]
    assert events[0].frame_id == "shelf-001"


def test_expired_and_future_coupons_not_emitted(manager, session, shelf_frame):
    # milk-001 coupon expired in spring, milk-003 coupon starts in fall
    manager.submit_frame(session.session_id, shelf_frame)
    ids = {e.coupon.coupon_id for e in manager.coupon_events(session.session_id)}
    assert "cpn-milk1-spring" not in ids
    assert "cpn-milk3-fall" not in ids


def test_events_only_for_seen_products(manager, session, shelf_frame):
    manager.submit_frame(session.session_id, shelf_frame)
    for e in manager.coupon_events(session.session_id):
        assert e.coupon.product_id in manager.get(session.session_id).seen_products


def test_events_since_cursor(manager, session, shelf_frame):
    manager.submit_frame(session.session_id, shelf_frame)
    events = manager.coupon_events(session.session_id)
    assert manager.coupon_events(session.session_id, since=events[-1].seq) == []
