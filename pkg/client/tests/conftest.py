"""Shared fixture: one sailsim server subprocess for the whole test run."""

import socket
import subprocess
import sys
import time

import pytest


def _free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture(scope="session")
def server_address():
    port = _free_port()
    proc = subprocess.Popen(
        [sys.executable, "-m", "sailsim", "serve", "--address", f"127.0.0.1:{port}"],
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
        text=True,
    )
    try:
        line = proc.stdout.readline()
        if "serving on" not in line:
            raise RuntimeError(f"server failed to start: {line!r}")
        # the listening socket exists before the ready line is printed
        yield ("127.0.0.1", port)
    finally:
        proc.terminate()
        try:
            proc.wait(timeout=10)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()


# a tiny mission so functional tests finish in a handful of steps
SHORT_MISSION = {
    "waypoints": {"A": [15.0, 0.0]},
    "sequence": "A",
    "time_limit": 120.0,
}


def wait_for(predicate, timeout=5.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if predicate():
            return True
        time.sleep(0.05)
    return False
