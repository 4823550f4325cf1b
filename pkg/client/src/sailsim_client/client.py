"""Blocking client for the sailsim newline-JSON episode protocol.

One client owns one connection and therefore one episode session.  Requests
and responses are strictly in order, so the client is a thin state-free
wrapper: it sends one line, reads one line, and turns protocol-level errors
into exceptions.
"""

from __future__ import annotations

import json
import socket
from dataclasses import dataclass

PROTOCOL_VERSION = "1"


class ClientError(Exception):
    """Base class for everything this module raises on purpose."""


class ProtocolError(ClientError):
    """The server closed the connection or sent something unparseable."""


class ServerError(ClientError):
    """The server answered with an error response."""

    def __init__(self, code, message):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


@dataclass(frozen=True)
class StepResult:
    observation: list
    reward: float
    terminated: bool
    truncated: bool
    info: dict


class SailsimClient:
    """One episode session against a sailsim server.

    Usage::

        with connect("127.0.0.1", 7331) as client:
            obs = client.reset(seed=0)
            while True:
                result = client.step([0.0, 0.5, 3.0])
                if result.terminated or result.truncated:
                    break
    """

    def __init__(self, sock):
        self._sock = sock
        self._file = sock.makefile("rwb")
        self.observation_space = None
        self.action_space = None
        self._closed = False

    # -- wire --------------------------------------------------------------

    def _request(self, obj):
        if self._closed:
            raise ClientError("client is closed")
        try:
            self._file.write((json.dumps(obj) + "\n").encode("utf-8"))
            self._file.flush()
            line = self._file.readline()
        except OSError as exc:
            raise ProtocolError(f"connection failed: {exc}") from exc
        if not line:
            raise ProtocolError("server closed the connection")
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"unparseable response: {exc}") from exc
        if not isinstance(response, dict) or "type" not in response:
            raise ProtocolError(f"malformed response: {response!r}")
        if response["type"] == "error":
            raise ServerError(response.get("code", "unknown"), response.get("message", ""))
        return response

    def _expect(self, response, rtype):
        if response["type"] != rtype:
            raise ProtocolError(f"expected '{rtype}' response, got '{response['type']}'")
        return response

    # -- protocol ----------------------------------------------------------

    def hello(self):
        """Negotiate the protocol version and fetch the space descriptions."""
        ack = self._expect(self._request({"type": "hello", "protocol_version": PROTOCOL_VERSION}), "ack")
        spaces = ack.get("spaces", {})
        self.observation_space = spaces.get("observation")
        self.action_space = spaces.get("action")
        return ack

    def reset(self, seed, mission=None):
        """Start a new episode; returns the first observation.

        `mission` is an optional mapping with `waypoints` (label ->
        [north, east]), `sequence`, and optional `radius` / `time_limit`,
        overriding the server's configured mission.
        """
        request = {"type": "reset", "seed": int(seed)}
        if mission is not None:
            request["mission"] = mission
        obs = self._expect(self._request(request), "obs")
        return obs["observation"]

    def step(self, action):
        """Advance one control period with `action` = [rudder, boom, propeller]."""
        action = [float(x) for x in action]
        if len(action) != 3:
            raise ValueError("action must have exactly 3 components")
        obs = self._expect(self._request({"type": "step", "action": action}), "obs")
        return StepResult(
            observation=obs["observation"],
            reward=obs["reward"],
            terminated=obs["terminated"],
            truncated=obs["truncated"],
            info=obs.get("info", {}),
        )

    def close(self):
        """Tell the server goodbye and drop the connection (idempotent)."""
        if self._closed:
            return
        try:
            self._request({"type": "close"})
        except ClientError:
            pass
        finally:
            self._closed = True
            try:
                self._file.close()
            except OSError:
                pass  # flushing into a dead connection is fine on close
            finally:
                self._sock.close()

    # -- context manager ---------------------------------------------------

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()
        return False


def connect(host, port, timeout=30.0):
    """Open a connection, say hello, and return a ready client."""
    sock = socket.create_connection((host, port), timeout=timeout)
    client = SailsimClient(sock)
    try:
        client.hello()
    except ClientError:
        client.close()
        raise
    return client
