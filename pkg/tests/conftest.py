from __future__ import annotations

import threading
import time
from pathlib import Path

import pytest
import uvicorn

from matcontrib.api import create_app

DATA_DIR = Path(__file__).parent / "data"

SERVER_KEYS = {"demo-key": "demo", "other-key": "other"}


@pytest.fixture(scope="session")
def sample_text() -> str:
    """The two-material sample file (caesium/palladium) used across suites."""
    return (DATA_DIR / "two_materials.mpfile").read_text(encoding="utf-8")


@pytest.fixture
def live_server(tmp_path_factory):
    """A real HTTP server on an ephemeral port, with a fresh store."""
    data_dir = tmp_path_factory.mktemp("server") / "data"
    app = create_app(data_dir, api_keys=SERVER_KEYS)
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)
