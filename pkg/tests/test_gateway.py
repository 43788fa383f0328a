import json
import threading
import time

import pytest
from fastapi.testclient import TestClient

from pictobridge.bus import TOPIC_COMMANDS, TOPIC_EXPLANATIONS
from pictobridge.composer import ExplanationMessage
from pictobridge.gateway import build_app
from pictobridge.runtime import Runtime


@pytest.fixture
def runtime(tmp_path):
    rt = Runtime(
        scenario="warehouse",
        seed=42,
        board_dir=tmp_path / "boards",
        data_dir=tmp_path / "data",
        tick_hz=50.0,
    )
    rt.ensure_boards()
    rt.start(ticking=False)  # tests drive ticks manually where needed
    yield rt
    rt.stop()


@pytest.fixture
def client(runtime):
    app = build_app(runtime, heartbeat_seconds=0.3)
    with TestClient(app) as test_client:
        yield test_client


def wait_for(predicate, timeout=3.0, interval=0.01):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        value = predicate()
        if value:
            return value
        time.sleep(interval)
    raise AssertionError("condition not met in time")


# -- POST /api/command -------------------------------------------------------


def test_command_json_body_bridges_exact_token(runtime, client):
    sub = runtime.bus.subscribe(TOPIC_COMMANDS)
    response = client.post("/api/command", json={"command": "why"})
    assert response.status_code == 200
    assert response.json() == {"status": "ok", "published": "why"}
    assert sub.get(timeout=1).payload == "why"
    sub.close()


def test_command_plain_text_body(runtime, client):
    sub = runtime.bus.subscribe(TOPIC_COMMANDS)
    response = client.post(
        "/api/command", content=b"goal", headers={"content-type": "text/plain"}
    )
    assert response.status_code == 200
    assert response.json()["published"] == "goal"
    assert sub.get(timeout=1).payload == "goal"
    sub.close()


def test_command_args_normalized_to_colon_form(runtime, client):
    sub = runtime.bus.subscribe(TOPIC_COMMANDS)
    response = client.post(
        "/api/command", json={"command": "define", "args": {"value": "SLAM"}}
    )
    assert response.json()["published"] == "define:SLAM"
    assert sub.get(timeout=1).payload == "define:SLAM"
    sub.close()


def test_unknown_token_gets_clarification_not_drop(runtime, client):
    sub = runtime.bus.subscribe(TOPIC_EXPLANATIONS)
    response = client.post("/api/command", json={"command": "frobnicate"})
    assert response.status_code == 200
    message = json.loads(sub.get(timeout=2).payload)
    assert message["source"] == "system"
    assert "did not understand" in message["text"]["en"]
    sub.close()


def test_command_malformed_bodies(client):
    response = client.post(
        "/api/command", content=b"{not json", headers={"content-type": "application/json"}
    )
    assert response.status_code == 400
    response = client.post(
        "/api/command", content=b"two words", headers={"content-type": "text/plain"}
    )
    assert response.status_code == 400
    response = client.post(
        "/api/command", content=b"", headers={"content-type": "text/plain"}
    )
    assert response.status_code == 400


def test_command_body_too_large(client):
    response = client.post(
        "/api/command", content=b"x" * 5000, headers={"content-type": "text/plain"}
    )
    assert response.status_code == 413


def test_bridge_fidelity_randomized_tokens(runtime, client):
    # acceptance-grade check lives in test_acceptance; this is the unit variant
    sub = runtime.bus.subscribe(TOPIC_COMMANDS)
    tokens = ["why", "stop", "go", "wait", "goal", "define:SLAM", "language:es"]
    for token in tokens:
        client.post("/api/command", json={"command": token})
    observed = [sub.get(timeout=1).payload for _ in tokens]
    assert observed == tokens
    sub.close()


# -- GET /api/board/{id} ------------------------------------------------------


def test_board_endpoint_bit_identical_to_export(runtime, client):
    for board_id in ("interaction", "explanation", "full"):
        response = client.get(f"/api/board/{board_id}")
        assert response.status_code == 200
        on_disk = (runtime.board_dir / f"{board_id}.json").read_bytes()
        assert response.content == on_disk


def test_board_unknown_404(client):
    assert client.get("/api/board/nope").status_code == 404


def test_interaction_board_cells_via_http(client):
    raw = client.get("/api/board/interaction").json()
    tokens = [c["action"].get("token") for c in raw["cells"] if c["action"]["kind"] == "command"]
    for expected in ("why", "stop", "wait"):
        assert expected in tokens


def test_full_board_via_http_contains_box_take_want(client):
    raw = client.get("/api/board/full").json()
    concepts = {c["concept"] for c in raw["cells"]}
    assert {"box", "take", "want"} <= concepts


# -- profile / feedback / history ------------------------------------------------


def test_profile_patch_triggers_confirmation_on_stream(runtime, client):
    sub = runtime.bus.subscribe(TOPIC_EXPLANATIONS)
    response = client.post("/api/profile", json={"language": "en"})
    assert response.status_code == 200
    assert response.json()["profile"]["language"] == "en"
    message = json.loads(sub.get(timeout=2).payload)
    assert message["text"]["en"].startswith("Language set to")
    sub.close()


def test_profile_rejects_bad_patch(client):
    assert client.post("/api/profile", json={"detail": "verbose"}).status_code == 400
    assert client.post("/api/profile", json={}).status_code == 400
    assert client.post("/api/profile", json={"pace_ms": -1}).status_code == 400


def test_profile_get_returns_counts(client):
    data = client.get("/api/profile").json()
    assert data["profile"]["detail"] == "standard"
    assert data["feedback"] == {"yes": 0, "no": 0}


def test_feedback_roundtrip_and_unknown(runtime, client):
    # produce a message first
    client.post("/api/command", json={"command": "goal"})
    wait_for(lambda: runtime.engine.last_message is not None)
    message_id = runtime.engine.last_message.id
    response = client.post("/api/feedback", json={"message_id": message_id, "helpful": True})
    assert response.status_code == 200
    assert response.json()["feedback"]["yes"] == 1
    assert client.post(
        "/api/feedback", json={"message_id": "ghost", "helpful": True}
    ).status_code == 404
    assert client.post("/api/feedback", json={"message_id": message_id}).status_code == 400


def test_history_limits(runtime, client):
    client.post("/api/command", json={"command": "goal"})
    wait_for(lambda: client.get("/api/history?limit=50").json()["entries"])
    assert client.get("/api/history?limit=0").json()["entries"] == []
    assert client.get("/api/history?limit=-1").status_code == 400
    assert client.get("/api/history?limit=x").status_code == 400
    entries = client.get("/api/history?limit=50").json()["entries"]
    assert entries[-1]["type"] == "message"  # newest last


# -- SSE stream --------------------------------------------------------------------
#
# The ASGI test transport buffers whole responses, so the infinite SSE stream
# is exercised against a real uvicorn server on an ephemeral port.


@pytest.fixture
def live_server(runtime):
    import uvicorn

    app = build_app(runtime, heartbeat_seconds=0.2)
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def collect_sse_frames(base_url, count, trigger=None, timeout=6.0, want=None):
    """Read SSE frames (joined line blocks) from /api/stream."""
    import httpx

    frames = []
    with httpx.Client(base_url=base_url, timeout=10.0) as http:
        with http.stream("GET", "/api/stream") as response:
            assert response.status_code == 200
            assert response.headers["content-type"].startswith("text/event-stream")
            if trigger is not None:
                threading.Thread(target=trigger, daemon=True).start()
            buffer = []
            start = time.monotonic()
            for line in response.iter_lines():
                if line == "":
                    if buffer:
                        frames.append("\n".join(buffer))
                        buffer = []
                    if len(frames) >= count or (want is not None and want(frames)):
                        break
                else:
                    buffer.append(line)
                if time.monotonic() - start > timeout:
                    break
    return frames


def sse_data(frame):
    return "\n".join(
        line[len("data: "):] for line in frame.splitlines() if line.startswith("data: ")
    )


def test_stream_emits_board_status_then_explanations(runtime, live_server):
    def trigger():
        time.sleep(0.1)
        runtime.publish_command("goal")

    frames = collect_sse_frames(live_server, 3, trigger)
    assert frames[0].startswith("event: board")
    assert frames[1].startswith("event: status")
    assert any(f.startswith("event: explanation") for f in frames), frames


def test_stream_explanation_round_trips(runtime, live_server):
    def trigger():
        time.sleep(0.1)
        runtime.publish_command("goal")

    frames = collect_sse_frames(live_server, 3, trigger)
    frame = next(f for f in frames if f.startswith("event: explanation"))
    payload = json.loads(sse_data(frame))
    message = ExplanationMessage.from_dict(payload)
    assert message.to_dict() == payload
    assert message.source in ("user-initiated", "system")


def test_stream_preserves_emission_order(runtime, live_server):
    def trigger():
        time.sleep(0.1)
        for token in ("goal", "why", "summary"):
            runtime.publish_command(token)

    def got_three_explanations(frames):
        return sum(f.startswith("event: explanation") for f in frames) >= 3

    frames = collect_sse_frames(live_server, 99, trigger, want=got_three_explanations)
    payloads = [json.loads(sse_data(f)) for f in frames if f.startswith("event: explanation")]
    numbers = [int(p["id"].split("-")[1]) for p in payloads]
    assert len(numbers) >= 3
    assert numbers == sorted(numbers)


def test_stream_heartbeat_when_idle(runtime, live_server):
    import httpx

    got_heartbeat = False
    with httpx.Client(base_url=live_server, timeout=10.0) as http:
        with http.stream("GET", "/api/stream") as response:
            start = time.monotonic()
            for line in response.iter_lines():
                if line.startswith(": heartbeat"):
                    got_heartbeat = True
                    break
                if time.monotonic() - start > 4:
                    break
    assert got_heartbeat


def test_default_heartbeat_interval_is_fifteen_seconds():
    from pictobridge.gateway import DEFAULT_HEARTBEAT_SECONDS

    assert DEFAULT_HEARTBEAT_SECONDS == 15.0


def test_root_fallback_page(client):
    response = client.get("/")
    assert response.status_code == 200
    assert "pictobridge" in response.text
