"""End-to-end checks against a live server on a loopback port."""

import json
import threading

import pytest
import requests

from draftmarks.fixtures import FIXTURES, bruce_log
from draftmarks.schema_io import parse_schema
from draftmarks.service import make_server
from draftmarks.store import SessionStore


@pytest.fixture()
def base_url(tmp_path):
    store = SessionStore(tmp_path)
    server = make_server(store, "127.0.0.1:0")
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    yield f"http://{host}:{port}"
    server.shutdown()
    thread.join(timeout=5)


def ingest(base_url, build):
    resp = requests.post(f"{base_url}/v1/sessions",
                         data=build().encode("utf-8"))
    assert resp.status_code == 201
    return resp.json()["id"]


def test_healthz(base_url):
    resp = requests.get(f"{base_url}/v1/healthz")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_ingest_then_fetch_all_roles(base_url):
    sid = ingest(base_url, bruce_log)
    assert len(sid) == 64
    for role in ("teacher", "reviewer", "general", "writer"):
        resp = requests.get(f"{base_url}/v1/sessions/{sid}/schema",
                            params={"role": role})
        assert resp.status_code == 200
        parse_schema(resp.content)
        page = requests.get(f"{base_url}/v1/sessions/{sid}/export",
                            params={"role": role})
        assert page.status_code == 200
        assert page.headers["content-type"].startswith("text/html")
        assert '<main id="doc">' in page.text


def test_reingest_returns_same_id(base_url):
    first = ingest(base_url, bruce_log)
    second = ingest(base_url, bruce_log)
    assert first == second


def test_raw_log_is_writer_only(base_url):
    sid = ingest(base_url, bruce_log)
    for role in ("teacher", "reviewer", "general"):
        resp = requests.get(f"{base_url}/v1/sessions/{sid}/log",
                            params={"role": role})
        assert resp.status_code == 403
        assert resp.headers["content-type"].startswith(
            "application/problem+json")
    ok = requests.get(f"{base_url}/v1/sessions/{sid}/log",
                      params={"role": "writer"})
    assert ok.status_code == 200
    assert ok.content == bruce_log().encode("utf-8")


def test_bad_requests(base_url):
    sid = ingest(base_url, bruce_log)
    # empty body
    assert requests.post(f"{base_url}/v1/sessions", data=b"").status_code == 400
    # body that is not a session log
    bad = requests.post(f"{base_url}/v1/sessions", data=b"not json\n")
    assert bad.status_code == 400
    assert bad.json()["title"] == "invalid session log"
    assert "line 1" in bad.json()["detail"]
    # unknown role, missing role, duplicated role
    url = f"{base_url}/v1/sessions/{sid}/schema"
    assert requests.get(url, params={"role": "author"}).status_code == 400
    assert requests.get(url).status_code == 400
    assert requests.get(url + "?role=teacher&role=writer").status_code == 400


def test_not_found(base_url):
    missing = "e" * 64
    resp = requests.get(f"{base_url}/v1/sessions/{missing}/schema",
                        params={"role": "teacher"})
    assert resp.status_code == 404
    body = resp.json()
    assert body["status"] == 404
    assert requests.get(f"{base_url}/v1/nope").status_code == 404
    assert requests.delete(f"{base_url}/v1/sessions").status_code == 405


def test_every_fixture_round_trips(base_url):
    for build in FIXTURES.values():
        sid = ingest(base_url, build)
        envelope = requests.get(
            f"{base_url}/v1/sessions/{sid}/schema",
            params={"role": "teacher"}).content
        schema = json.loads(envelope)["schema"]
        assert schema["session"] == sid
