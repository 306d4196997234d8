"""HTTP session service: CRUD semantics, window recompute, error codes."""

import json

import pytest
from fastapi.testclient import TestClient

from apax.service import SessionStore, create_app

SYNTH_SOURCE = {
    "synth": {
        "kind": "BandlimitedNoise", "dtype": "i16", "length": 16384,
        "amplitude": 28000, "oversampling_ratio": 4, "snr_db": 50.0,
        "seed": 31, "name": "svc_test",
    }
}
GRID = [30.0, 40.0, 50.0, 60.0, 70.0]


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


@pytest.fixture(scope="module")
def session(client):
    resp = client.post("/sessions", json={
        "source": SYNTH_SOURCE, "grid": GRID, "block_size": 1024})
    assert resp.status_code == 200
    return resp.json()


class TestCreate:
    def test_curve_shape(self, session):
        assert len(session["curve"]) == len(GRID)
        assert [p["srr_target"] for p in session["curve"]] == GRID
        assert all(p["ratio"] > 0 and -1 <= p["r"] <= 1 for p in session["curve"])

    def test_recommended_reaches_five_nines(self, session):
        rec = session["recommended"]
        assert not rec["target_unreachable"]
        assert rec["r"] >= 0.99999

    def test_default_grid_point_count(self, client):
        src = dict(SYNTH_SOURCE["synth"], length=8192)
        resp = client.post("/sessions", json={"source": {"synth": src},
                                              "block_size": 1024})
        assert resp.status_code == 200
        assert len(resp.json()["curve"]) == 21

    def test_missing_source_is_400(self, client):
        assert client.post("/sessions", json={}).status_code == 400

    def test_bad_spec_is_400(self, client):
        bad = dict(SYNTH_SOURCE["synth"], oversampling_ratio=0.25)
        resp = client.post("/sessions", json={"source": {"synth": bad}})
        assert resp.status_code == 400

    def test_missing_file_is_422(self, client):
        resp = client.post("/sessions", json={
            "source": {"raw": {"path": "/nonexistent.raw", "dtype": "i16"}}})
        assert resp.status_code == 422

    def test_non_json_body_is_400(self, client):
        resp = client.post("/sessions", content=b"not json",
                           headers={"content-type": "application/json"})
        assert resp.status_code == 400


class TestCurveAndWindows:
    def test_get_curve(self, client, session):
        resp = client.get(f"/sessions/{session['id']}/curve")
        assert resp.status_code == 200
        assert resp.json()["curve"] == session["curve"]

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/deadbeef/curve").status_code == 404
        assert client.get("/sessions/deadbeef/windows",
                          params={"srr_target": 50}).status_code == 404

    def test_windows_at_grid_point(self, client, session):
        resp = client.get(f"/sessions/{session['id']}/windows",
                          params={"srr_target": 50.0})
        assert resp.status_code == 200
        body = resp.json()
        assert len(body["metrics"]) == 18
        assert body["spectra"]["x"]["bins_db"]
        assert body["s2r"]["cdf"]

    def test_windows_idempotent(self, client, session):
        url = f"/sessions/{session['id']}/windows"
        a = client.get(url, params={"srr_target": 60.0})
        b = client.get(url, params={"srr_target": 60.0})
        assert a.content == b.content

    def test_windows_at_recommended_matches_contract(self, client, session):
        rec = session["recommended"]
        resp = client.get(f"/sessions/{session['id']}/windows",
                          params={"srr_target": rec["srr_target"]})
        metrics = resp.json()["metrics"]
        assert metrics["pearson_r"] == pytest.approx(rec["r"], abs=1e-12)

    def test_grid_max_has_highest_r(self, client, session):
        resp = client.get(f"/sessions/{session['id']}/windows",
                          params={"srr_target": GRID[-1]})
        r_max = resp.json()["metrics"]["pearson_r"]
        assert r_max >= max(p["r"] for p in session["curve"]) - 1e-12

    def test_out_of_range_target_400(self, client, session):
        url = f"/sessions/{session['id']}/windows"
        step = GRID[1] - GRID[0]
        assert client.get(url, params={"srr_target": GRID[-1] + step + 1}).status_code == 400
        assert client.get(url, params={"srr_target": GRID[0] - step - 1}).status_code == 400
        # One grid step beyond the ends is allowed (drag overshoot).
        assert client.get(url, params={"srr_target": GRID[-1] + step}).status_code == 200


class TestDelete:
    def test_delete_then_404(self, client):
        src = dict(SYNTH_SOURCE["synth"], length=4096)
        resp = client.post("/sessions", json={"source": {"synth": src},
                                              "grid": [40.0, 60.0],
                                              "block_size": 1024})
        sid = resp.json()["id"]
        assert client.delete(f"/sessions/{sid}").status_code == 204
        assert client.get(f"/sessions/{sid}/curve").status_code == 404
        assert client.delete(f"/sessions/{sid}").status_code == 404


class TestStore:
    def test_lru_eviction(self):
        store = SessionStore(cap=2)
        ids = [store.add(object()) for _ in range(3)]  # type: ignore[arg-type]
        assert store.get(ids[0]) is None
        assert store.get(ids[1]) is not None and store.get(ids[2]) is not None

    def test_recently_used_survives(self):
        store = SessionStore(cap=2)
        a = store.add(object())  # type: ignore[arg-type]
        b = store.add(object())  # type: ignore[arg-type]
        store.get(a)
        store.add(object())  # type: ignore[arg-type]
        assert store.get(a) is not None and store.get(b) is None
