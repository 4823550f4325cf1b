"""Line-oriented TCP surface for driving episodes from external trainers.

Wire format: newline-delimited JSON, UTF-8, one response per request, in
order.  Each connection owns exactly one episode session; run many
connections for vectorized training.  Floats are serialized with Python's
shortest-round-trip repr, so remote streams match in-process streams bit
for bit.

Requests:  {"type": "hello", "protocol_version": "1"}
           {"type": "reset", "seed": 42, "mission": {...}?}
           {"type": "step", "action": [rudder, boom, propeller]}
           {"type": "close"}
Responses: {"type": "ack", ...} | {"type": "obs", ...} | {"type": "error",
           "code": ..., "message": ...}
"""

from __future__ import annotations

import json
import os
import socket
import socketserver
import threading

from .episode import Action, SailingEnv
from .errors import EpisodeContractError

PROTOCOL_VERSION = "1"
DEFAULT_PORT = int(os.environ.get("SAILSIM_PORT", "7331"))

# session states
NEW, READY, RUNNING, FINISHED = "new", "ready", "running", "finished"


class Session:
    """Protocol state machine for one connection."""

    def __init__(self, make_env):
        self.make_env = make_env
        self.env = None
        self.state = NEW

    def handle(self, request):
        """One request dict in, one response dict out (never raises)."""
        if not isinstance(request, dict) or "type" not in request:
            return _error("parse", "request must be an object with a 'type' field")
        rtype = request["type"]
        if rtype == "hello":
            return self._hello(request)
        if rtype == "close":
            return {"type": "ack", "closed": True}
        if self.state == NEW:
            return _error("state", "say hello first")
        if rtype == "reset":
            return self._reset(request)
        if rtype == "step":
            return self._step(request)
        return _error("parse", f"unknown request type '{rtype}'")

    def _hello(self, request):
        wanted = str(request.get("protocol_version", PROTOCOL_VERSION))
        if wanted != PROTOCOL_VERSION:
            return _error("version", f"server speaks protocol {PROTOCOL_VERSION}, client asked for {wanted}")
        if self.env is None:
            self.env = self.make_env()
        self.state = READY
        return {
            "type": "ack",
            "protocol_version": PROTOCOL_VERSION,
            "spaces": {
                "observation": self.env.observation_space(),
                "action": self.env.action_space(),
            },
        }

    def _reset(self, request):
        if "seed" not in request:
            return _error("parse", "reset requires a 'seed'")
        mission = None
        if "mission" in request:
            from .config import mission_from_dict

            mission = mission_from_dict(request["mission"])
        try:
            obs = self.env.reset(int(request["seed"]), mission=mission)
        except (TypeError, ValueError) as exc:
            return _error("parse", f"bad reset request: {exc}")
        self.state = RUNNING
        return {
            "type": "obs",
            "observation": obs.as_array(),
            "reward": 0.0,
            "terminated": False,
            "truncated": False,
            "info": {},
        }

    def _step(self, request):
        if self.state == READY:
            return _error("not_reset", "reset before stepping")
        if self.state == FINISHED:
            return _error("finished", "episode is over; reset to start a new one")
        action = request.get("action")
        if not (isinstance(action, (list, tuple)) and len(action) == 3):
            return _error("parse", "action must be a list [rudder, boom, propeller]")
        try:
            result = self.env.step(Action.from_array(action))
        except EpisodeContractError as exc:
            return _error("finished", str(exc))
        except (TypeError, ValueError) as exc:
            return _error("parse", f"bad action: {exc}")
        if result.terminated or result.truncated:
            self.state = FINISHED
        return {
            "type": "obs",
            "observation": result.observation.as_array(),
            "reward": result.reward,
            "terminated": result.terminated,
            "truncated": result.truncated,
            "info": result.info,
        }


def _error(code, message):
    return {"type": "error", "code": code, "message": message}


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        session = Session(self.server.make_env)
        timeout = self.server.idle_timeout
        if timeout:
            self.connection.settimeout(timeout)
        while True:
            try:
                line = self.rfile.readline()
            except (socket.timeout, ConnectionError, OSError):
                return
            if not line:
                return
            line = line.strip()
            if not line:
                continue
            try:
                request = json.loads(line.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError):
                self._send(_error("parse", "invalid JSON"))
                return
            response = session.handle(request)
            self._send(response)
            if response.get("type") == "error" and response["code"] in ("parse", "version"):
                return
            if response.get("closed"):
                return

    def _send(self, obj):
        try:
            self.wfile.write((json.dumps(obj) + "\n").encode("utf-8"))
            self.wfile.flush()
        except (ConnectionError, OSError):
            pass


class EnvServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, make_env, idle_timeout=None):
        self.make_env = make_env
        self.idle_timeout = idle_timeout
        super().__init__(address, _Handler)


def serve(address, env_config, idle_timeout=None, ready_event=None):
    """Run the environment server until shutdown() is called or SIGINT/SIGTERM.

    `ready_event` (threading.Event) is set once the socket is bound.
    Returns the server object when used with start_server().
    """
    server = start_server(address, env_config, idle_timeout=idle_timeout)
    if ready_event is not None:
        ready_event.set()
    try:
        server.serve_forever()
    finally:
        server.server_close()


def start_server(address, env_config, idle_timeout=None):
    """Bind and return an EnvServer; run it with serve_forever (own thread ok)."""

    def make_env():
        return SailingEnv(env_config)

    return EnvServer(address, make_env, idle_timeout=idle_timeout)


def serve_in_thread(address, env_config, idle_timeout=None):
    """Convenience for tests: returns (server, thread) already serving."""
    server = start_server(address, env_config, idle_timeout=idle_timeout)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread
