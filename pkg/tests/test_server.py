import io
import json
import socket
import time
import urllib.error
import urllib.request

import pytest

from canteen import protocol
from canteen.server import ServerBundle, parse_policy


def test_policy_grammar():
    assert parse_policy("all_office").kind == "all_office"
    assert parse_policy("before9").kind == "canteen_before_9"
    assert parse_policy("cutoff:8:35").cutoff == 35
    mixed = parse_policy("mixed:8:50:0.5")
    assert (mixed.guess_time, mixed.guess_q) == (50, 0.5)
    logistic = parse_policy("logistic:12.5:-0.25")
    assert (logistic.alpha, logistic.beta) == (12.5, -0.25)
    for bad in ("mixed:8:50", "cutoff", "nonsense", "mixed:8:50:x", "logistic:1"):
        with pytest.raises(ValueError):
            parse_policy(bad)


def test_frame_round_trip():
    message = {"type": "decision", "action": "canteen"}
    encoded = protocol.encode(message)
    assert protocol.read_message(io.BytesIO(encoded)) == message
    stream = io.BytesIO(encoded + protocol.encode({"type": "x"}))
    assert protocol.read_message(stream) == message
    assert protocol.read_message(stream) == {"type": "x"}
    assert protocol.read_message(stream) is None


def test_frame_errors():
    with pytest.raises(protocol.FrameError):
        protocol.read_message(io.BytesIO(b"zzz\n{}"))
    with pytest.raises(protocol.FrameError):
        protocol.read_message(io.BytesIO(b"5\n{}"))
    with pytest.raises(protocol.FrameError):
        protocol.read_message(io.BytesIO(b"7\n[1,2,3]"))


@pytest.fixture()
def bundle():
    server = ServerBundle(tick=0.02)
    server.start()
    yield server
    server.stop()


def http_json(method, url, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(url, data=data, method=method)
    if data:
        req.add_header("Content-Type", "application/json")
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read().decode())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read().decode())


def create_bot_session(bundle, rounds=2, seed=3):
    status, created = http_json(
        "POST",
        f"http://127.0.0.1:{bundle.http.port}/api/sessions",
        {
            "rounds": rounds,
            "seed": seed,
            "bots": {"2": "before9"},
            "timings": {"decision": 5.0, "certainty": 5.0, "results": 0.05},
        },
    )
    assert status == 200
    return created["session"], created["tokens"]["1"]


class WireClient:
    def __init__(self, port, sid, seat, token):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=5)
        self.stream = self.sock.makefile("rb")
        self.received = []
        protocol.send_message(
            self.sock, {"type": "join", "session": sid, "seat": seat, "token": token}
        )

    def send(self, message):
        protocol.send_message(self.sock, message)

    def next_message(self, want_type=None, timeout=5.0):
        deadline = time.time() + timeout
        while time.time() < deadline:
            self.sock.settimeout(deadline - time.time())
            message = protocol.read_message(self.stream)
            if message is None:
                break
            self.received.append(message)
            if want_type is None or message["type"] == want_type:
                return message
        raise AssertionError(f"no {want_type} message arrived")

    def close(self):
        self.sock.close()


def test_wire_session_against_bot(bundle):
    sid, token = create_bot_session(bundle, rounds=2)
    client = WireClient(bundle.wire.port, sid, 1, token)
    try:
        assert client.next_message("joined")["seat"] == 1
        for _ in range(2):
            start = client.next_message("round_start")
            assert start["your_arrival"].count(":") == 1
            client.send({"type": "decision", "action": "office"})
            client.next_message("phase")
            client.send({"type": "certainty", "level": "quite_certain"})
            result = client.next_message("round_result")
            assert result["your_certainty"] == "quite_certain"
            assert len(result["arrivals"]) == 2
        over = client.next_message("game_over")
        assert over["reason"] in ("completed", "ruin")
        client.send({"type": "postgame", "cutoff": "There is no such time", "simple": "No"})
        time.sleep(0.1)
    finally:
        client.close()
    status, body = http_json(
        "GET", f"http://127.0.0.1:{bundle.http.port}/api/sessions/{sid}"
    )
    assert status == 200 and body["phase"] == "finished"


def test_wire_rejects_bad_join(bundle):
    sid, _ = create_bot_session(bundle)
    client = WireClient(bundle.wire.port, sid, 1, "bogus")
    try:
        assert client.next_message("error")["code"] == "bad_token"
    finally:
        client.close()


def test_wire_wrong_phase_error_is_pushed(bundle):
    sid, token = create_bot_session(bundle)
    client = WireClient(bundle.wire.port, sid, 1, token)
    try:
        client.next_message("round_start")
        client.send({"type": "certainty", "level": "very_certain"})
        assert client.next_message("error")["code"] == "wrong_phase"
    finally:
        client.close()


def test_http_poll_flow(bundle):
    sid, token = create_bot_session(bundle, rounds=1)
    base = f"http://127.0.0.1:{bundle.http.port}/api/sessions/{sid}/seats/1"
    status, joined = http_json("POST", f"{base}/messages?token={token}", {"type": "join"})
    assert status == 200 and joined["type"] == "joined"

    def poll_until(want_type, cursor=0, timeout=5.0):
        deadline = time.time() + timeout
        while time.time() < deadline:
            _, body = http_json("GET", f"{base}/messages?token={token}&cursor={cursor}")
            cursor = body["cursor"]
            for message in body["messages"]:
                if message["type"] == want_type:
                    return message, cursor
            time.sleep(0.02)
        raise AssertionError(f"no {want_type} over poll")

    _, cursor = poll_until("round_start")
    status, _ = http_json("POST", f"{base}/messages?token={token}", {"type": "decision", "action": "office"})
    assert status == 200
    status, _ = http_json("POST", f"{base}/messages?token={token}", {"type": "certainty", "level": "very_certain"})
    assert status == 200
    result, cursor = poll_until("round_result", cursor)
    assert result["actions"][0] == "office"
    poll_until("game_over", cursor)

    log_url = f"http://127.0.0.1:{bundle.http.port}/api/sessions/{sid}/log"
    with urllib.request.urlopen(log_url) as resp:
        lines = resp.read().decode().strip().splitlines()
    assert len(lines) == 2
    from canteen.service import verify_log

    assert verify_log(lines) == []


def test_http_error_codes(bundle):
    sid, token = create_bot_session(bundle)
    base = f"http://127.0.0.1:{bundle.http.port}"
    status, body = http_json("GET", f"{base}/api/sessions/missing")
    assert status == 404 and body["code"] == "unknown_session"
    status, body = http_json(
        "POST", f"{base}/api/sessions/{sid}/seats/1/messages?token=wrong", {"type": "join"}
    )
    assert status == 403 and body["code"] == "bad_token"
    status, body = http_json("POST", f"{base}/api/sessions", {"rounds": 0})
    assert status == 400 and body["code"] == "invalid_config"
    status, body = http_json(
        "POST", f"{base}/api/sessions", {"bots": {"2": "not-a-policy"}}
    )
    assert status == 400 and body["code"] == "invalid_config"
