"""Path-aware JSON field extraction used by the catalog and wire parsers."""

from __future__ import annotations

import json
import math
from datetime import datetime, timezone
from typing import Any

from .errors import SchemaError


def parse_json(source: bytes | str, path: str = "") -> Any:
    """json.loads with syntax errors reported as line/column SchemaErrors."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        return json.loads(source)
    except json.JSONDecodeError as e:
        where = f"line {e.lineno} column {e.colno}"
        raise SchemaError(f"{path}: {where}" if path else where, e.msg) from e


def _type_name(value: Any) -> str:
    return {
        dict: "object", list: "array", str: "string", bool: "boolean",
        int: "number", float: "number", type(None): "null",
    }.get(type(value), type(value).__name__)


def get_obj(doc: dict, key: str, path: str) -> dict:
    value = _require(doc, key, path)
    if not isinstance(value, dict):
        raise SchemaError(f"{path}.{key}", f"expected object, got {_type_name(value)}")
    return value


def get_list(doc: dict, key: str, path: str, default: list | None = None) -> list:
    if default is not None and key not in doc:
        return default
    value = _require(doc, key, path)
    if not isinstance(value, list):
        raise SchemaError(f"{path}.{key}", f"expected array, got {_type_name(value)}")
    return value


def get_str(doc: dict, key: str, path: str, default: str | None = None) -> str:
    if default is not None and key not in doc:
        return default
    value = _require(doc, key, path)
    if not isinstance(value, str):
        raise SchemaError(f"{path}.{key}", f"expected string, got {_type_name(value)}")
    return value


def get_number(doc: dict, key: str, path: str, default: float | None = None) -> float:
    if default is not None and key not in doc:
        return default
    value = _require(doc, key, path)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{path}.{key}", f"expected number, got {_type_name(value)}")
    if not math.isfinite(value):
        raise SchemaError(f"{path}.{key}", f"expected finite number, got {value}")
    return float(value)


def get_int(doc: dict, key: str, path: str, default: int | None = None) -> int:
    if default is not None and key not in doc:
        return default
    value = _require(doc, key, path)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{path}.{key}", f"expected integer, got {_type_name(value)}")
    return value


def get_bool(doc: dict, key: str, path: str, default: bool | None = None) -> bool:
    if default is not None and key not in doc:
        return default
    value = _require(doc, key, path)
    if not isinstance(value, bool):
        raise SchemaError(f"{path}.{key}", f"expected boolean, got {_type_name(value)}")
    return value


def _require(doc: dict, key: str, path: str) -> Any:
    if not isinstance(doc, dict):
        raise SchemaError(path, f"expected object, got {_type_name(doc)}")
    if key not in doc:
        raise SchemaError(f"{path}.{key}" if path else key, "missing required field")
    return doc[key]


def parse_timestamp(doc: dict, key: str, path: str) -> datetime:
    """ISO-8601 UTC timestamp; a trailing Z is accepted and normalized."""
    raw = get_str(doc, key, path)
    try:
        ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except ValueError as e:
        raise SchemaError(f"{path}.{key}", f"invalid ISO-8601 timestamp {raw!r}") from e
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def iso_utc(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
