"""HTTP service and the CLI thin client against a live instance."""

from __future__ import annotations

import csv
import io
import threading
import time

import pytest
import uvicorn
from fastapi.testclient import TestClient

from dbicm.cli import main
from dbicm.service.app import create_app
from dbicm.sweep import SimConfig, emit_csv, run_sweep

TINY_REQ = {
    "scheme": "dbicm-wd", "mod": "qam16", "delay": "0,1,0,1", "tn": 5,
    "window": 2, "iters": 1, "bp_iters": 5, "code": "peg:3,6,48",
    "seed": 5, "min_error_frames": 3, "max_frames": 40,
    "ebn0_points": [2.0, 4.0],
}

TINY_CFG = SimConfig(
    scheme="dbicm-wd", mod="qam16", delays=(0, 1, 0, 1), t_n=5,
    window=2, iters=1, bp_iters=5, code_spec="peg:3,6,48",
    master_seed=5, min_error_frames=3, max_frames=40,
)


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


def _wait_state(client, job_id, targets, timeout=60.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        body = client.get(f"/sweeps/{job_id}").json()
        if body["state"] in targets:
            return body
        time.sleep(0.05)
    raise AssertionError(f"sweep {job_id} stuck in {body['state']}")


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["version"]


def test_sweep_job_end_to_end(client):
    resp = client.post("/sweeps", json=TINY_REQ)
    assert resp.status_code == 202
    job_id = resp.json()["id"]
    body = _wait_state(client, job_id, ("done", "failed"))
    assert body["state"] == "done"
    assert body["points_done"] == body["points_total"] == 2
    assert [r["ebn0_db"] for r in body["records"]] == [2.0, 4.0]
    # the CSV endpoint serves exactly what an in-process sweep emits
    buf = io.StringIO()
    emit_csv(run_sweep(TINY_CFG, [2.0, 4.0]), buf)
    got = client.get(f"/sweeps/{job_id}/csv")
    assert got.status_code == 200
    assert got.text == buf.getvalue()
    listed = client.get("/sweeps").json()
    assert any(j["id"] == job_id for j in listed)


def test_sweep_validation(client):
    bad_window = dict(TINY_REQ, window=5)  # exceeds n_codewords
    assert client.post("/sweeps", json=bad_window).status_code == 422
    bad_delay = dict(TINY_REQ, delay="0,x")
    assert client.post("/sweeps", json=bad_delay).status_code == 422
    bad_scheme = dict(TINY_REQ, scheme="turbo")
    assert client.post("/sweeps", json=bad_scheme).status_code == 422
    assert client.post("/sweeps", json=dict(TINY_REQ, ebn0_points=[]),
                       ).status_code == 422


def test_sweep_not_found(client):
    assert client.get("/sweeps/nope").status_code == 404
    assert client.get("/sweeps/nope/csv").status_code == 404
    assert client.delete("/sweeps/nope").status_code == 404


def test_sweep_cancellation(client):
    # unreachable error target keeps the job running until cancelled
    req = dict(TINY_REQ, ebn0_points=[30.0], min_error_frames=1000,
               max_frames=100000)
    job_id = client.post("/sweeps", json=req).json()["id"]
    assert client.delete(f"/sweeps/{job_id}").status_code == 200
    body = _wait_state(client, job_id, ("cancelled", "done", "failed"),
                       timeout=30.0)
    assert body["state"] == "cancelled"


def test_constellation_endpoint(client):
    doc = client.get("/constellations/qam16").json()
    assert doc["m"] == 4 and len(doc["points"]) == 16
    text = client.get("/constellations/qpsk", params={"format": "csv"}).text
    assert text.splitlines()[0] == "label,bits,re,im"
    assert len(text.splitlines()) == 5
    assert client.get("/constellations/qam256").status_code == 404


@pytest.fixture(scope="module")
def live_server():
    config = uvicorn.Config(create_app(), host="127.0.0.1", port=0,
                            log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10.0
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("service did not start")
        time.sleep(0.02)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5.0)


def test_cli_thin_client(live_server, tmp_path):
    """`simulate --server` must produce the same CSV as a local run."""
    out = tmp_path / "remote.csv"
    rc = main([
        "simulate", "--scheme", "dbicm-wd", "--mod", "qam16",
        "--delay", "0,1,0,1", "--tn", "5", "-W", "2", "--iters", "1",
        "--bp-iters", "5", "--code", "peg:3,6,48", "--seed", "5",
        "--min-error-frames", "3", "--max-frames", "40",
        "--ebn0", "2,4", "--quiet", "--poll-interval", "0.05",
        "--server", live_server, "--out", str(out),
    ])
    assert rc == 0
    buf = io.StringIO()
    emit_csv(run_sweep(TINY_CFG, [2.0, 4.0]), buf)
    assert out.read_text() == buf.getvalue()
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 2


def test_cli_thin_client_rejection(live_server, capsys):
    rc = main([
        "simulate", "--tn", "5", "-W", "9", "--code", "peg:3,6,48",
        "--ebn0", "2", "--quiet", "--server", live_server,
    ])
    assert rc == 1
    assert "rejected" in capsys.readouterr().err
