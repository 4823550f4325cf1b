"""TCP client for the sailsim episode server.

Talks the server's newline-delimited JSON protocol; no dependency on the
simulator package itself, so it can drive a server running anywhere.
"""

from .client import (
    ClientError,
    ProtocolError,
    SailsimClient,
    ServerError,
    StepResult,
    connect,
)

__all__ = [
    "ClientError",
    "ProtocolError",
    "SailsimClient",
    "ServerError",
    "StepResult",
    "connect",
]
