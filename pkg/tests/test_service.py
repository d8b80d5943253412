"""HTTP surface tests: endpoint shapes, error mapping, job lifecycle."""

import time

import pytest
from fastapi.testclient import TestClient

from hapticrec.config import AppConfig
from hapticrec.errors import ProviderError
from hapticrec.runtime import AppState, build_state
from hapticrec.service import create_app

from conftest import fixture_doc
from test_store import DOF6_GROUNDED_IDS


@pytest.fixture()
def state(tmp_path) -> AppState:
    return build_state(AppConfig(data_dir=str(tmp_path / "data")))


@pytest.fixture()
def client(state) -> TestClient:
    # raise_server_exceptions off: unexpected errors should surface as the
    # JSON error shape, not as a re-raised exception in the test process.
    return TestClient(create_app(state), raise_server_exceptions=False)


def _session(client) -> str:
    resp = client.post("/api/sessions")
    assert resp.status_code == 200
    return resp.json()["session_id"]


def _error(resp):
    body = resp.json()
    assert set(body) == {"error"}
    assert set(body["error"]) == {"code", "message", "retryable"}
    return body["error"]


# --- sessions + chat ---


def test_create_session_returns_fresh_id(client, state):
    first = _session(client)
    second = _session(client)
    assert first != second
    assert state.sessions.exists(first) and state.sessions.exists(second)


def test_chat_returns_linked_recommendations(client, state):
    sid = _session(client)
    resp = client.post(
        f"/api/sessions/{sid}/chat",
        json={"prompt": "a grounded device with at least 6 degrees of freedom"},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert set(body) == {"text", "recommendations", "template_id"}
    recs = body["recommendations"]
    assert 1 <= len(recs) <= 5
    for rec in recs:
        assert set(rec) == {"id", "name", "rank_score", "n_pos", "n_all", "cosine", "links"}
        device = state.store.get_device(rec["id"])
        assert rec["name"] == device.name
        assert rec["links"] == device.source_links
        assert rec["links"]
        assert f"[device:{rec['id']}]" in body["text"]


def test_chat_scores_match_direct_agent_run(client, state):
    # API parity: the HTTP payload is exactly the agent's response dict.
    prompt = "a grounded device with at least 6 degrees of freedom"
    sid = _session(client)
    via_http = client.post(f"/api/sessions/{sid}/chat", json={"prompt": prompt}).json()
    direct = state.agent.chat_turn(state.sessions.create().id, prompt).to_dict()
    assert via_http == direct


def test_chat_unknown_session_is_not_found(client):
    resp = client.post("/api/sessions/ghost/chat", json={"prompt": "a stylus"})
    assert resp.status_code == 404
    err = _error(resp)
    assert err["code"] == "not_found"
    assert err["retryable"] is False


def test_chat_blank_prompt_is_bad_request(client):
    sid = _session(client)
    resp = client.post(f"/api/sessions/{sid}/chat", json={"prompt": "   "})
    assert resp.status_code == 400
    assert _error(resp)["code"] == "bad_request"


def test_chat_provider_outage_maps_to_503(state):
    class DownCompletion:
        def complete(self, prompt, *, max_tokens=512):
            raise ProviderError("upstream timed out", retryable=True)

    state.agent.completion = DownCompletion()
    client = TestClient(create_app(state), raise_server_exceptions=False)
    sid = _session(client)
    resp = client.post(f"/api/sessions/{sid}/chat", json={"prompt": "a 6 dof arm"})
    assert resp.status_code == 503
    err = _error(resp)
    assert err["code"] == "provider_unavailable"
    assert err["retryable"] is True


# --- devices ---


def test_get_device_returns_full_record(client, state):
    resp = client.get("/api/devices/1")
    assert resp.status_code == 200
    assert resp.json() == state.store.get_device(1).to_dict()


def test_get_missing_device_is_404(client):
    resp = client.get("/api/devices/999999")
    assert resp.status_code == 404
    assert _error(resp)["code"] == "not_found"


def test_device_filter_matches_structured_query(client):
    resp = client.get("/api/devices?attr.dof=gte:6&attr.grounded=eq:true")
    assert resp.status_code == 200
    assert [d["id"] for d in resp.json()["devices"]] == DOF6_GROUNDED_IDS


def test_device_list_without_filters_returns_whole_corpus(client, state):
    resp = client.get("/api/devices")
    ids = [d["id"] for d in resp.json()["devices"]]
    assert ids == sorted(r.id for r in state.store.query_structured([]))
    assert len(ids) == 20


@pytest.mark.parametrize(
    "query",
    [
        "attr.dof=6",  # missing <op>: prefix
        "attr.dof=above:6",  # unknown operator
        "attr.antigravity=eq:true",  # attribute not in the schema
        "attr.grounded=gt:true",  # op incompatible with boolean
    ],
)
def test_bad_device_filters_are_rejected(client, query):
    resp = client.get(f"/api/devices?{query}")
    assert resp.status_code == 400
    assert _error(resp)["code"] == "bad_request"


def test_read_endpoints_do_not_mutate_store(client, state):
    before = state.store.export_json()
    client.get("/api/devices")
    client.get("/api/devices/1")
    client.get("/api/devices?attr.dof=gte:6")
    client.get("/api/samples")
    assert state.store.export_json() == before


# --- samples ---


def test_samples_lists_packaged_queries(client, state):
    resp = client.get("/api/samples")
    assert resp.status_code == 200
    samples = resp.json()["samples"]
    assert samples == state.samples
    assert samples and all(isinstance(s, str) for s in samples)


# --- ingest jobs ---


def _wait_for_job(client, job_id, deadline_s=5.0):
    deadline = time.monotonic() + deadline_s
    while time.monotonic() < deadline:
        body = client.get(f"/api/ingest/{job_id}").json()
        if body["status"] in ("done", "error"):
            return body
        time.sleep(0.01)
    pytest.fail(f"ingest job {job_id} still {body['status']} after {deadline_s}s")


def test_ingest_job_reaches_done_with_review_id(client, state, tmp_path):
    doc = tmp_path / "vf6.html"
    doc.write_text(fixture_doc("virtuforce_vf6.html"))
    resp = client.post(
        "/api/ingest",
        json={"uri": str(doc), "kind": "html", "source_kind": "commercial"},
    )
    assert resp.status_code == 200
    job_id = resp.json()["job_id"]
    body = _wait_for_job(client, job_id)
    assert body["status"] == "done"
    assert body["error"] is None
    staged = state.pipeline.get_review(body["review_id"])
    assert staged.decision == "pending"
    assert staged.draft.name == "VirtuForce VF-6"


def test_ingest_job_failure_is_reported_not_raised(client):
    resp = client.post(
        "/api/ingest",
        json={"uri": "/nowhere/missing.html", "kind": "html", "source_kind": "commercial"},
    )
    body = _wait_for_job(client, resp.json()["job_id"])
    assert body["status"] == "error"
    assert "missing.html" in body["error"]
    assert body["review_id"] is None


def test_unknown_ingest_job_is_404(client):
    resp = client.get("/api/ingest/deadbeef")
    assert resp.status_code == 404
    assert _error(resp)["code"] == "not_found"


# --- middleware ---


def test_cors_allows_browser_origins(client):
    resp = client.get("/api/samples", headers={"Origin": "http://localhost:5173"})
    assert resp.headers.get("access-control-allow-origin") == "*"
