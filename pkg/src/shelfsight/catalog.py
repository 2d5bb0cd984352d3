"""Local product database: lookup, coupons, per-type feature scales.

The catalog is an immutable snapshot loaded from a JSON document. Radar
axes are normalized against per-type min/max scales so that every product
of a type shares the same axis scale; features flagged direction="desc"
(price, calories, ...) are inverted so outward on a glyph always reads
"more desirable".
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from datetime import datetime
from typing import Mapping

from .errors import MissingScaleError, SchemaError
from .validation import (
    get_int,
    get_list,
    get_number,
    get_obj,
    get_str,
    iso_utc,
    parse_json,
    parse_timestamp,
)

ASC = "asc"
DESC = "desc"

# Top-level record fields usable as axes alongside the per-type specs.
# Price is lower-is-better; everything else defaults to higher-is-better.
BUILTIN_FEATURES: dict[str, str] = {"price": DESC, "rating": ASC, "review_count": ASC}


@dataclass(frozen=True)
class SpecValue:
    value: float
    unit: str = ""
    direction: str = ASC


@dataclass(frozen=True)
class ProductRecord:
    product_id: str
    name: str
    brand: str
    product_type: str
    price: float
    rating: float
    review_count: int
    specs: Mapping[str, SpecValue]


@dataclass(frozen=True)
class Coupon:
    coupon_id: str
    product_id: str
    description: str
    discount: float
    valid_from: datetime
    valid_until: datetime


@dataclass(frozen=True)
class FeatureScale:
    product_type: str
    feature: str
    min_value: float
    max_value: float
    direction: str = ASC


@dataclass(frozen=True)
class AxisValue:
    """One normalized radar axis; missing axes render at 0 but stay flagged."""

    feature: str
    value: float
    missing: bool = False


def feature_value(record: ProductRecord, feature: str) -> float | None:
    """Numeric value of a feature for a record, or None if absent."""
    if feature == "price":
        return record.price
    if feature == "rating":
        return record.rating
    if feature == "review_count":
        return float(record.review_count)
    spec = record.specs.get(feature)
    return spec.value if spec is not None else None


class Catalog:
    """Immutable product/coupon snapshot with per-type scale queries."""

    def __init__(self, products: list[ProductRecord], coupons: list[Coupon]):
        self._by_id: dict[str, ProductRecord] = {}
        for r in products:
            if r.product_id in self._by_id:
                raise SchemaError("products", f"duplicate product_id {r.product_id!r}")
            self._by_id[r.product_id] = r
        self._coupons = tuple(coupons)
        self._directions = self._check_directions(products)

    @staticmethod
    def _check_directions(products: list[ProductRecord]) -> dict[tuple[str, str], str]:
        directions: dict[tuple[str, str], str] = {}
        for r in products:
            for feature, spec in r.specs.items():
                key = (r.product_type, feature)
                seen = directions.setdefault(key, spec.direction)
                if seen != spec.direction:
                    raise SchemaError(
                        f"products[{r.product_id}].specs.{feature}",
                        f"direction {spec.direction!r} conflicts with {seen!r} "
                        f"for type {r.product_type!r}",
                    )
        return directions

    def __len__(self) -> int:
        return len(self._by_id)

    @property
    def products(self) -> list[ProductRecord]:
        return sorted(self._by_id.values(), key=lambda r: r.product_id)

    @property
    def coupons(self) -> tuple[Coupon, ...]:
        return self._coupons

    def get(self, product_id: str) -> ProductRecord | None:
        return self._by_id.get(product_id)

    def query(self, ids: list[str]) -> tuple[list[ProductRecord], list[str]]:
        """Records for every known id in input order, plus the unknown ids."""
        found: list[ProductRecord] = []
        missing: list[str] = []
        for pid in ids:
            record = self._by_id.get(pid)
            if record is None:
                missing.append(pid)
            else:
                found.append(record)
        return found, missing

    def active_coupons(self, ids: list[str], now: datetime) -> list[Coupon]:
        """Coupons for the given products whose validity window contains now.

        The window is closed on both ends. Output order follows the coupon
        order in the catalog document.
        """
        wanted = set(ids)
        return [
            c
            for c in self._coupons
            if c.product_id in wanted and c.valid_from <= now <= c.valid_until
        ]

    def feature_scales(self, product_type: str, features: list[str]) -> list[FeatureScale]:
        """Min/max per feature over every record of the type.

        Features no record of the type possesses are omitted; an unknown
        type yields an empty list.
        """
        records = [r for r in self._by_id.values() if r.product_type == product_type]
        scales: list[FeatureScale] = []
        for feature in features:
            values = [v for r in records if (v := feature_value(r, feature)) is not None]
            if not values:
                continue
            direction = BUILTIN_FEATURES.get(
                feature, self._directions.get((product_type, feature), ASC)
            )
            scales.append(
                FeatureScale(product_type, feature, min(values), max(values), direction)
            )
        return scales

    def serialize(self) -> dict:
        """Document form of the catalog; load_catalog() of it round-trips."""
        return {
            "products": [
                {
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
                for r in self.products
            ],
            "coupons": [
                {
                    "coupon_id": c.coupon_id,
                    "product_id": c.product_id,
                    "description": c.description,
                    "discount": c.discount,
                    "valid_from": iso_utc(c.valid_from),
                    "valid_until": iso_utc(c.valid_until),
                }
                for c in self._coupons
            ],
        }


def load_catalog(source: bytes | str | io.IOBase) -> Catalog:
    """Parse and validate a catalog document (see README for the schema)."""
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        source = source.read()
    doc = parse_json(source, "catalog")
    if not isinstance(doc, dict):
        raise SchemaError("catalog", "expected a JSON object at the top level")

    products = [
        _parse_product(item, f"products[{i}]")
        for i, item in enumerate(get_list(doc, "products", "catalog"))
    ]
    coupons = [
        _parse_coupon(item, f"coupons[{i}]")
        for i, item in enumerate(get_list(doc, "coupons", "catalog", default=[]))
    ]
    return Catalog(products, coupons)


def _parse_product(doc: dict, path: str) -> ProductRecord:
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected object")
    price = get_number(doc, "price", path)
    if price < 0:
        raise SchemaError(f"{path}.price", f"must be >= 0, got {price}")
    rating = get_number(doc, "rating", path)
    if not 0.0 <= rating <= 5.0:
        raise SchemaError(f"{path}.rating", f"must be in [0,5], got {rating}")
    review_count = get_int(doc, "review_count", path, default=0)
    if review_count < 0:
        raise SchemaError(f"{path}.review_count", f"must be >= 0, got {review_count}")

    specs: dict[str, SpecValue] = {}
    raw_specs = get_obj(doc, "specs", path) if "specs" in doc else {}
    for name, raw in raw_specs.items():
        spec_path = f"{path}.specs.{name}"
        if not isinstance(raw, dict):
            raise SchemaError(spec_path, "expected object with a value field")
        direction = get_str(raw, "direction", spec_path, default=ASC)
        if direction not in (ASC, DESC):
            raise SchemaError(f"{spec_path}.direction", f"must be 'asc' or 'desc', got {direction!r}")
        specs[name] = SpecValue(
            value=get_number(raw, "value", spec_path),
            unit=get_str(raw, "unit", spec_path, default=""),
            direction=direction,
        )

    return ProductRecord(
        product_id=get_str(doc, "product_id", path),
        name=get_str(doc, "name", path),
        brand=get_str(doc, "brand", path),
        product_type=get_str(doc, "product_type", path),
        price=price,
        rating=rating,
        review_count=review_count,
        specs=specs,
    )


def _parse_coupon(doc: dict, path: str) -> Coupon:
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected object")
    discount = get_number(doc, "discount", path)
    if discount < 0:
        raise SchemaError(f"{path}.discount", f"must be >= 0, got {discount}")
    valid_from = parse_timestamp(doc, "valid_from", path)
    valid_until = parse_timestamp(doc, "valid_until", path)
    if valid_from > valid_until:
        raise SchemaError(f"{path}.valid_from", "must be <= valid_until")
    return Coupon(
        coupon_id=get_str(doc, "coupon_id", path),
        product_id=get_str(doc, "product_id", path),
        description=get_str(doc, "description", path),
        discount=discount,
        valid_from=valid_from,
        valid_until=valid_until,
    )


def normalize_value(value: float | None, scale: FeatureScale) -> AxisValue:
    """Normalize one raw value against a scale; None marks the axis missing."""
    if value is None:
        return AxisValue(scale.feature, 0.0, missing=True)
    if scale.max_value == scale.min_value:
        return AxisValue(scale.feature, 0.5)
    t = (value - scale.min_value) / (scale.max_value - scale.min_value)
    if scale.direction == DESC:
        t = 1.0 - t
    return AxisValue(scale.feature, t)


def normalize(
    record: ProductRecord, scales: list[FeatureScale], features: list[str]
) -> list[AxisValue]:
    """Normalized axis values for a record, one per requested feature.

    Scales for other product types are ignored; a feature with no covering
    scale for the record's type raises MissingScaleError.
    """
    by_feature = {s.feature: s for s in scales if s.product_type == record.product_type}
    axes: list[AxisValue] = []
    for feature in features:
        scale = by_feature.get(feature)
        if scale is None:
            raise MissingScaleError(feature)
        axes.append(normalize_value(feature_value(record, feature), scale))
    return axes
