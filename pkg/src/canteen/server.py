"""Network transports for SessionService.

Two equivalent surfaces move the same per-seat message stream:

* a persistent TCP connection speaking length-delimited JSON (see
  protocol.py): the client sends a join message, then decision /
  certainty / postgame messages; the server pushes everything appearing
  in the seat's outbox plus synchronous error replies;

* an HTTP fallback for clients that cannot open raw sockets (browsers):
  POST the same JSON messages, GET the outbox from a cursor.

HTTP routes (all JSON unless noted):
    POST /api/sessions                     create; body may name bot seats
    GET  /api/sessions/{sid}               public state summary
    POST /api/sessions/{sid}/seats/{n}/messages?token=T   one client message
    GET  /api/sessions/{sid}/seats/{n}/messages?token=T&cursor=K
    GET  /api/sessions/{sid}/log           JSONL export (text/plain)
    GET  /{path}                           static files when configured

The HTTP server can also serve a static directory (the browser client),
so one origin hosts both the page and its API.
"""

from __future__ import annotations

import json
import socketserver
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import protocol
from .agents import Policy, SessionConfig
from .game import Action, TimeRange, parse_time
from .scoring import Certainty
from .service import ProtocolError, SessionService, Timings

POLICY_GRAMMAR = "all_office | before9 | cutoff:H:MM | mixed:H:MM:q | logistic:a:b"


def parse_policy(text: str) -> Policy:
    """Parse the CLI/API policy grammar: all_office | before9 |
    cutoff:H:MM | mixed:H:MM:q | logistic:a:b."""
    parts = text.strip().split(":")
    kind = parts[0]
    try:
        if kind == "all_office" and len(parts) == 1:
            return Policy.all_office()
        if kind == "before9" and len(parts) == 1:
            return Policy.canteen_before_nine()
        if kind == "cutoff" and len(parts) == 3:
            return Policy.cutoff_at(parse_time(f"{parts[1]}:{parts[2]}"))
        if kind == "mixed" and len(parts) == 4:
            return Policy.mixed_guess(parse_time(f"{parts[1]}:{parts[2]}"), float(parts[3]))
        if kind == "logistic" and len(parts) == 3:
            return Policy.logistic(float(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise ValueError(f"bad policy {text!r}: {exc}") from exc
    raise ValueError(f"bad policy {text!r}; grammar: {POLICY_GRAMMAR}")


def handle_client_message(
    service: SessionService, sid: str, seat: int, message: dict
) -> None:
    """Route one already-authenticated client message into the service."""
    mtype = message.get("type")
    try:
        if mtype == "decision":
            service.submit_decision(sid, seat, Action.parse(message["action"]))
        elif mtype == "certainty":
            service.submit_certainty(sid, seat, Certainty.parse(message["level"]))
        elif mtype == "postgame":
            answers = {k: v for k, v in message.items() if k != "type"}
            service.submit_postgame(sid, seat, answers)
        else:
            raise ProtocolError("bad_message", f"unknown message type {mtype!r}")
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ProtocolError):
            raise
        raise ProtocolError("bad_message", str(exc)) from exc


def build_session(service: SessionService, spec: dict) -> dict:
    """Create a session from a JSON spec; returns ids and human seat tokens."""
    try:
        rng = TimeRange.parse(spec.get("tmin", "8:00"), spec.get("tmax", "9:10"))
        cfg = SessionConfig(
            range=rng,
            max_rounds=int(spec.get("rounds", 10)),
            endowment=float(spec.get("endowment", 10.0)),
            seed=int(spec.get("seed", 0)),
        )
        timing_spec = spec.get("timings", {})
        timings = Timings(
            decision=float(timing_spec.get("decision", 61.0)),
            certainty=float(timing_spec.get("certainty", 61.0)),
            results=float(timing_spec.get("results", 30.0)),
            instructions=float(timing_spec.get("instructions", 240.0)),
        )
        bots = {int(seat): parse_policy(p) for seat, p in spec.get("bots", {}).items()}
    except (TypeError, ValueError) as exc:
        raise ProtocolError("invalid_config", str(exc)) from exc
    sid = service.create_session(cfg, timings)
    for seat, policy in bots.items():
        service.join_bot(sid, seat, policy)
    tokens = {
        str(seat): service.seat_token(sid, seat) for seat in (1, 2) if seat not in bots
    }
    return {"session": sid, "tokens": tokens}


class _WireHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        service: SessionService = self.server.service  # type: ignore[attr-defined]
        try:
            hello = protocol.read_message(self.rfile)
        except protocol.FrameError:
            return
        if not hello or hello.get("type") != "join":
            protocol.send_message(self.request, {"type": "error", "code": "bad_message",
                                                 "detail": "first message must be join"})
            return
        sid = hello.get("session", "")
        seat = hello.get("seat", 0)
        token = hello.get("token", "")
        write_lock = threading.Lock()
        try:
            service.join(sid, seat, token)
        except ProtocolError as exc:
            protocol.send_message(self.request, exc.to_message())
            return

        stop = threading.Event()

        def pump() -> None:
            cursor = int(hello.get("cursor", 0))
            while not stop.is_set():
                try:
                    messages, cursor = service.poll(sid, seat, token, cursor)
                    for message in messages:
                        with write_lock:
                            protocol.send_message(self.request, message)
                except (ProtocolError, OSError):
                    return
                stop.wait(0.05)

        pusher = threading.Thread(target=pump, daemon=True)
        pusher.start()
        try:
            while True:
                message = protocol.read_message(self.rfile)
                if message is None:
                    break
                try:
                    handle_client_message(service, sid, seat, message)
                except ProtocolError as exc:
                    with write_lock:
                        protocol.send_message(self.request, exc.to_message())
        except (protocol.FrameError, OSError):
            pass
        finally:
            stop.set()
            pusher.join(timeout=1.0)


class WireServer(socketserver.ThreadingTCPServer):
    """Persistent-connection transport."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, service: SessionService, host: str = "127.0.0.1", port: int = 0):
        super().__init__((host, port), _WireHandler)
        self.service = service

    @property
    def port(self) -> int:
        return self.server_address[1]


class _HttpHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    @property
    def service(self) -> SessionService:
        return self.server.service  # type: ignore[attr-defined]

    @property
    def static_dir(self) -> Path | None:
        return self.server.static_dir  # type: ignore[attr-defined]

    def log_message(self, fmt: str, *args) -> None:  # quiet by default
        pass

    def _send_json(self, status: int, payload) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error(self, exc: ProtocolError) -> None:
        status = {
            "unknown_session": 404,
            "unknown_seat": 404,
            "bad_token": 403,
            "seat_taken": 409,
            "duplicate_submission": 409,
        }.get(exc.code, 400)
        self._send_json(status, exc.to_message())

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length) if length else b"{}"
        try:
            body = json.loads(raw.decode("utf-8") or "{}")
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ProtocolError("bad_message", f"body is not JSON: {exc}") from exc
        if not isinstance(body, dict):
            raise ProtocolError("bad_message", "body must be a JSON object")
        return body

    def _route(self) -> tuple[list[str], dict]:
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        query = {k: v[-1] for k, v in parse_qs(url.query).items()}
        return parts, query

    def do_POST(self) -> None:  # noqa: N802 (http.server naming)
        parts, query = self._route()
        try:
            body = self._read_body()
            if parts == ["api", "sessions"]:
                self._send_json(200, build_session(self.service, body))
                return
            if (
                len(parts) == 6
                and parts[:2] == ["api", "sessions"]
                and parts[3] == "seats"
                and parts[5] == "messages"
            ):
                sid, seat = parts[2], int(parts[4])
                token = query.get("token", "")
                if body.get("type") == "join":
                    snapshot = self.service.join(sid, seat, token)
                    self._send_json(200, snapshot)
                else:
                    self.service.authenticate(sid, seat, token)
                    handle_client_message(self.service, sid, seat, body)
                    self._send_json(200, {"ok": True})
                return
            self._send_json(404, {"type": "error", "code": "not_found", "detail": self.path})
        except ProtocolError as exc:
            self._send_error(exc)
        except (TypeError, ValueError) as exc:
            self._send_error(ProtocolError("bad_message", str(exc)))

    def do_GET(self) -> None:  # noqa: N802
        parts, query = self._route()
        try:
            if (
                len(parts) == 6
                and parts[:2] == ["api", "sessions"]
                and parts[3] == "seats"
                and parts[5] == "messages"
            ):
                sid, seat = parts[2], int(parts[4])
                messages, cursor = self.service.poll(
                    sid, seat, query.get("token", ""), int(query.get("cursor", 0))
                )
                self._send_json(200, {"messages": messages, "cursor": cursor})
                return
            if len(parts) == 3 and parts[:2] == ["api", "sessions"]:
                self._send_json(200, self.service.state_summary(parts[2]))
                return
            if len(parts) == 4 and parts[:2] == ["api", "sessions"] and parts[3] == "log":
                text = "\n".join(self.service.export_log(parts[2]))
                body = (text + "\n" if text else "").encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "text/plain; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
            self._serve_static(parts)
        except ProtocolError as exc:
            self._send_error(exc)
        except (TypeError, ValueError) as exc:
            self._send_error(ProtocolError("bad_message", str(exc)))

    def _serve_static(self, parts: list[str]) -> None:
        if self.static_dir is None:
            self._send_json(404, {"type": "error", "code": "not_found", "detail": self.path})
            return
        rel = "/".join(parts) or "index.html"
        target = (self.static_dir / rel).resolve()
        if not str(target).startswith(str(self.static_dir.resolve())) or not target.is_file():
            self._send_json(404, {"type": "error", "code": "not_found", "detail": self.path})
            return
        content_type = {
            ".html": "text/html; charset=utf-8",
            ".js": "text/javascript; charset=utf-8",
            ".css": "text/css; charset=utf-8",
            ".map": "application/json",
        }.get(target.suffix, "application/octet-stream")
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class HttpServer(ThreadingHTTPServer):
    """Poll-fallback transport plus static hosting for the browser client."""

    daemon_threads = True

    def __init__(
        self,
        service: SessionService,
        host: str = "127.0.0.1",
        port: int = 0,
        static_dir: Path | None = None,
    ):
        super().__init__((host, port), _HttpHandler)
        self.service = service
        self.static_dir = static_dir

    @property
    def port(self) -> int:
        return self.server_address[1]


class ServerBundle:
    """Wire + HTTP servers and a deadline ticker around one service."""

    def __init__(
        self,
        service: SessionService | None = None,
        host: str = "127.0.0.1",
        wire_port: int = 0,
        http_port: int = 0,
        static_dir: Path | None = None,
        tick: float = 0.1,
    ):
        self.service = service or SessionService()
        self.wire = WireServer(self.service, host, wire_port)
        self.http = HttpServer(self.service, host, http_port, static_dir)
        self._tick = tick
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []

    def start(self) -> None:
        self._threads = [
            threading.Thread(target=self.wire.serve_forever, daemon=True),
            threading.Thread(target=self.http.serve_forever, daemon=True),
            threading.Thread(target=self._run_ticker, daemon=True),
        ]
        for thread in self._threads:
            thread.start()

    def _run_ticker(self) -> None:
        while not self._stop.wait(self._tick):
            for sid in self.service.session_ids():
                try:
                    self.service.advance(sid)
                except ProtocolError:
                    continue

    def stop(self) -> None:
        self._stop.set()
        self.wire.shutdown()
        self.http.shutdown()
        self.wire.server_close()
        self.http.server_close()
        for thread in self._threads:
            thread.join(timeout=2.0)
