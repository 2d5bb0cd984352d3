import json
import threading
import time
from pathlib import Path

import pytest

from shelfsight.catalog import load_catalog
from shelfsight.wire import parse_scene_frame

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES_DIR = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture(scope="session")
def catalog_path() -> Path:
    return FIXTURES_DIR / "catalog.json"


@pytest.fixture(scope="session")
def bundled_catalog(catalog_path):
    with open(catalog_path, "rb") as fh:
        return load_catalog(fh)


@pytest.fixture(scope="session")
def shelf_frame_doc() -> dict:
    return json.loads((FIXTURES_DIR / "shelf" / "frame_001.json").read_text("utf-8"))


@pytest.fixture
def shelf_frame(shelf_frame_doc):
    return parse_scene_frame(json.loads(json.dumps(shelf_frame_doc)))


@pytest.fixture
def live_server(bundled_catalog):
    """Real uvicorn server on an ephemeral port, for socket-level tests."""
    import uvicorn

    from shelfsight.service import create_app

    config = uvicorn.Config(
        create_app(bundled_catalog), host="127.0.0.1", port=0, log_level="warning"
    )
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10.0
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)
