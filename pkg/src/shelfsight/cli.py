"""Headless driver: serve the API, replay fixtures, validate data files.

Exit codes: 0 ok, 1 runtime failure, 2 usage or validation failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import wire
from .catalog import Catalog, load_catalog
from .errors import SchemaError, ShelfSightError
from .fusion import SceneFrame
from .layout import glyph_anchor, overlap_ratio, screen_rect
from .service import create_app
from .session import EngineConfig, SessionManager
from .validation import parse_json

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _load_catalog_file(path: Path) -> Catalog:
    if not path.is_file():
        raise SchemaError(str(path), "catalog file not found")
    with open(path, "rb") as fh:
        return load_catalog(fh)


def _load_config_file(path: Path | None) -> EngineConfig:
    if path is None:
        return EngineConfig()
    if not path.is_file():
        raise SchemaError(str(path), "config file not found")
    return wire.parse_engine_config(parse_json(path.read_text("utf-8"), str(path)))


def _frame_files(fixtures: Path, catalog_path: Path | None) -> list[Path]:
    skip = catalog_path.resolve() if catalog_path else None
    return sorted(
        p for p in fixtures.glob("*.json") if skip is None or p.resolve() != skip
    )


def cmd_serve(args: argparse.Namespace) -> int:
    try:
        catalog = _load_catalog_file(Path(args.catalog))
        config = _load_config_file(Path(args.config) if args.config else None)
    except ShelfSightError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    fixtures_dir = Path(args.fixtures) if args.fixtures else None
    if fixtures_dir is not None and not fixtures_dir.is_dir():
        print(f"error: fixtures directory not found: {fixtures_dir}", file=sys.stderr)
        return EXIT_USAGE
    ui_dir = Path(args.ui) if args.ui else None
    if ui_dir is not None and not ui_dir.is_dir():
        print(f"error: ui directory not found: {ui_dir}", file=sys.stderr)
        return EXIT_USAGE

    app = create_app(catalog, config, fixtures_dir=fixtures_dir, ui_dir=ui_dir)

    import uvicorn

    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as e:
        print(f"error: cannot bind {args.host}:{args.port}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    fixtures = Path(args.fixtures)
    if not fixtures.is_dir():
        print(f"error: fixtures directory not found: {fixtures}", file=sys.stderr)
        return EXIT_USAGE
    catalog_path = Path(args.catalog)
    try:
        catalog = _load_catalog_file(catalog_path)
        config = _load_config_file(Path(args.config) if args.config else None)
    except ShelfSightError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    frames: list[tuple[Path, SceneFrame]] = []
    errors: list[str] = []
    for path in _frame_files(fixtures, catalog_path):
        try:
            frames.append((path, wire.parse_scene_frame(parse_json(path.read_text("utf-8"), path.name))))
        except SchemaError as e:
            errors.append(f"{path.name}: {e}")
    if errors:
        for line in errors:
            print(line, file=sys.stderr)
        return EXIT_USAGE

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    manager = SessionManager(catalog, config)
    session = manager.create_session()
    case_counts = {"BothSources": 0, "MarkerOnly": 0, "ObjectOnly": 0}
    ratios_before: list[float] = []
    ratios_after: list[float] = []

    for path, frame in frames:
        overlay = manager.submit_frame(session.session_id, frame)
        for fused in overlay.fused:
            case_counts[fused.provenance.value] += 1
        k = frame.intrinsics
        before = [screen_rect(glyph_anchor(f), k) for f in overlay.fused]
        after = [screen_rect(g.anchor_quad, k) for g in overlay.glyphs if g.visible]
        for rects, acc in ((before, ratios_before), (after, ratios_after)):
            for i in range(len(rects)):
                for j in range(i + 1, len(rects)):
                    acc.append(overlap_ratio(rects[i], rects[j]))
        out_file = out / f"{path.stem}.overlay.json"
        out_file.write_text(wire.dumps_canonical(wire.overlay_to_dict(overlay)), "utf-8")

    summary = {
        "frames": len(frames),
        "case_counts": case_counts,
        "mean_overlap_before": sum(ratios_before) / len(ratios_before) if ratios_before else 0.0,
        "mean_overlap_after": sum(ratios_after) / len(ratios_after) if ratios_after else 0.0,
    }
    (out / "summary.json").write_text(wire.dumps_canonical(summary), "utf-8")
    print(f"replayed {len(frames)} frame(s) -> {out}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    fixtures = Path(args.fixtures)
    errors: list[str] = []
    catalog: Catalog | None = None

    try:
        catalog = _load_catalog_file(Path(args.catalog))
    except ShelfSightError as e:
        errors.append(f"catalog: {e}")

    if not fixtures.is_dir():
        errors.append(f"fixtures: directory not found: {fixtures}")
        frame_files: list[Path] = []
    else:
        frame_files = _frame_files(fixtures, Path(args.catalog))

    seen_frame_ids: dict[str, str] = {}
    for path in frame_files:
        try:
            frame = wire.parse_scene_frame(parse_json(path.read_text("utf-8"), path.name))
        except SchemaError as e:
            errors.append(f"{path.name}: {e}")
            continue

        if frame.frame_id in seen_frame_ids:
            errors.append(
                f"{path.name}: duplicate frame_id {frame.frame_id!r} "
                f"(also in {seen_frame_ids[frame.frame_id]})"
            )
        else:
            seen_frame_ids[frame.frame_id] = path.name

        if catalog is not None:
            for i, m in enumerate(frame.markers):
                if catalog.get(m.product_id) is None:
                    errors.append(
                        f"{path.name}: markers[{i}]: unknown product_id {m.product_id!r}"
                    )
            for i, o in enumerate(frame.objects):
                if catalog.get(o.product_id) is None:
                    errors.append(
                        f"{path.name}: objects[{i}]: unknown product_id {o.product_id!r}"
                    )

        ref = frame.image_ref
        if ref and "://" not in ref and not (fixtures / ref).is_file():
            errors.append(f"{path.name}: image_ref {ref!r} not found in fixtures directory")

    for line in errors:
        print(line)
    print(f"{len(errors)} error(s)")
    return EXIT_OK if not errors else EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shelfsight",
        description="Fuse shelf observations into product poses and serve glyph overlays.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the session API")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--catalog", required=True, help="catalog JSON file")
    serve.add_argument("--fixtures", help="directory exposed at /fixtures for the UI demo")
    serve.add_argument("--config", help="engine config JSON file")
    serve.add_argument("--ui", help="directory of built web UI assets to serve at /")
    serve.set_defaults(func=cmd_serve)

    replay = sub.add_parser("replay", help="batch-process a fixture directory")
    replay.add_argument("--fixtures", required=True, help="directory of frame JSON files")
    replay.add_argument("--catalog", required=True)
    replay.add_argument("--out", required=True, help="output directory for overlays + summary")
    replay.add_argument("--config", help="engine config JSON file")
    replay.set_defaults(func=cmd_replay)

    validate = sub.add_parser("validate", help="schema + referential integrity report")
    validate.add_argument("--fixtures", required=True)
    validate.add_argument("--catalog", required=True)
    validate.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
