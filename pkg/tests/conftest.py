import shutil
import socket
from importlib import resources
from pathlib import Path

import pytest

SAMPLE = Path(str(resources.files("mtfidelity").joinpath("data", "sample")))


@pytest.fixture
def sample_dir(tmp_path) -> Path:
    """A writable copy of the bundled sample (corpus plus mock profiles)."""
    dest = tmp_path / "sample"
    shutil.copytree(SAMPLE, dest)
    return dest


class NetworkCalled(AssertionError):
    pass


@pytest.fixture
def no_network(monkeypatch):
    """Fail any attempt to open a socket connection."""
    calls = []

    def guard(*args, **kwargs):
        calls.append(args)
        raise NetworkCalled(f"network access attempted: {args!r}")

    monkeypatch.setattr(socket.socket, "connect", guard)
    monkeypatch.setattr(socket.socket, "connect_ex", guard)
    monkeypatch.setattr(socket, "create_connection", guard)
    monkeypatch.setattr(socket, "getaddrinfo", guard)
    return calls


# acceptance criteria register their outcome here; printed after the run
ACCEPTANCE: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in ACCEPTANCE.items():
        terminalreporter.write_line(f"{outcome}  {name}")
