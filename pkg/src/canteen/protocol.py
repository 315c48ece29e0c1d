"""Length-delimited JSON framing for the session wire protocol.

Each message is one UTF-8 JSON object preceded by its byte length as an
ASCII decimal line:

    b"17\\n{\\"type\\":\\"join\\"}"

The same message vocabulary travels over the HTTP poll fallback without
the framing (plain JSON bodies and arrays).

Client -> server types: join, decision, certainty, postgame.
Server -> client types: joined, round_start, phase, round_result,
game_over, error.
"""

from __future__ import annotations

import json
import socket
from typing import BinaryIO

MAX_FRAME = 1 << 20


class FrameError(ValueError):
    """Malformed frame or oversized payload."""


def encode(message: dict) -> bytes:
    payload = json.dumps(message, separators=(",", ":")).encode("utf-8")
    return str(len(payload)).encode("ascii") + b"\n" + payload


def read_message(stream: BinaryIO) -> dict | None:
    """Read one framed message; None at a clean end of stream."""
    header = b""
    while not header.endswith(b"\n"):
        byte = stream.read(1)
        if not byte:
            if header:
                raise FrameError("stream ended inside a frame header")
            return None
        header += byte
        if len(header) > 16:
            raise FrameError("frame header too long")
    try:
        length = int(header.strip())
    except ValueError:
        raise FrameError(f"bad frame header {header!r}") from None
    if not 0 <= length <= MAX_FRAME:
        raise FrameError(f"frame length {length} out of bounds")
    payload = b""
    while len(payload) < length:
        chunk = stream.read(length - len(payload))
        if not chunk:
            raise FrameError("stream ended inside a frame body")
        payload += chunk
    try:
        message = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FrameError(f"frame body is not JSON: {exc}") from exc
    if not isinstance(message, dict):
        raise FrameError("frame body must be a JSON object")
    return message


def send_message(sock: socket.socket, message: dict) -> None:
    sock.sendall(encode(message))
