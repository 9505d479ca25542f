"""HTTP service behavior: payloads, status codes, determinism."""
import pytest
from fastapi.testclient import TestClient

from duomine import chain
from duomine.params import symmetric_scenario
from duomine.service.app import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["version"]


def test_analyze_matches_library(client):
    resp = client.post("/analyze", json={"alpha1": 0.25, "alpha2": 0.25, "n_cap": 4})
    assert resp.status_code == 200
    data = resp.json()
    rep = chain.reward_rates(symmetric_scenario(0.25))
    assert data["states"] == rep.states
    assert tuple(data["relative"]) == pytest.approx(rep.relative)
    assert data["closed_form_cap"] == 4
    assert data["closed_form_residual"] < 1e-12


def test_analyze_honest_only(client):
    data = client.post("/analyze", json={}).json()
    assert data["relative"] == [0.0, 0.0, 1.0]
    assert data["yield_per_block"] == 1.0


def test_analyze_no_closed_form_for_other_caps(client):
    data = client.post("/analyze", json={"alpha1": 0.2, "alpha2": 0.2, "n_cap": 3}).json()
    assert data["closed_form_cap"] is None
    assert data["closed_form_residual"] is None


def test_analyze_edge_list(client):
    data = client.post(
        "/analyze", json={"alpha1": 0.25, "alpha2": 0.25, "n_cap": 2, "include_edges": True}
    ).json()
    lines = data["edges"].strip().split("\n")
    assert len(lines) == 27
    assert all(len(line.split()) == 6 for line in lines)


def test_validation_maps_to_422(client):
    resp = client.post("/analyze", json={"alpha1": 0.6, "alpha2": 0.2})
    assert resp.status_code == 422
    assert resp.json()["error"] == "HonestMinority"
    resp = client.post("/analyze", json={"alpha1": 0.7, "alpha2": 0.4})
    assert resp.status_code == 422
    assert resp.json()["error"] == "InvalidPartition"
    resp = client.post("/analyze", json={"alpha1": "lots"})
    assert resp.status_code == 422  # malformed json body, rejected by the schema


def test_honest_majority_can_be_waived(client):
    resp = client.post(
        "/analyze",
        json={"alpha1": 0.45, "alpha2": 0.35, "honest_majority_required": False},
    )
    assert resp.status_code == 200
    assert resp.json()["relative"][0] > 0.45


def test_simulate_replications_merge(client):
    payload = {"alpha1": 0.25, "alpha2": 0.25, "blocks": 50_000, "seed": 3,
               "replications": 3, "jobs": 2}
    data = client.post("/simulate", json=payload).json()
    assert data["conserved"]
    assert data["blocks"] == 150_000
    assert len(data["replications"]) == 3
    for i in range(3):
        assert data["credits"][i] == sum(r["credits"][i] for r in data["replications"])
    again = client.post("/simulate", json=payload).json()
    assert again == data
    serial = client.post("/simulate", json={**payload, "jobs": 1}).json()
    assert serial["credits"] == data["credits"]


def test_simulate_rejects_bad_counts(client):
    assert client.post("/simulate", json={"blocks": 0}).status_code == 422
    assert client.post("/simulate", json={"replications": 0}).status_code == 422
    assert client.post("/simulate", json={"jobs": 0}).status_code == 422


def test_threshold_endpoint(client):
    data = client.post("/threshold", json={"mode": "symmetric", "n_cap": 2}).json()
    assert data["threshold"] == pytest.approx(0.26638, abs=1e-4)
    assert data["honest_majority_ok"]
    resp = client.post("/threshold", json={"mode": "upward"})
    assert resp.status_code == 422


def test_transient_endpoint(client):
    payload = {"alpha1": 0.22, "alpha2": 0.22, "honest_majority_required": False,
               "epochs": 4}
    data = client.post("/transient", json=payload).json()
    assert data["profitable_after"] == 51
    assert data["days_to_profit"] == pytest.approx(714.0)
    assert len(data["rows"]) == 4
    assert data["rows"][0]["difficulty"] == 1.0


def test_transient_never_profitable(client):
    data = client.post("/transient", json={"alpha1": 0.1, "alpha2": 0.1, "epochs": 2}).json()
    assert data["profitable_after"] is None
    assert data["days_to_profit"] is None


def test_numerical_failures_map_to_400(client):
    resp = client.post(
        "/transient",
        json={"alpha1": 0.22, "alpha2": 0.22, "honest_majority_required": False,
              "epochs": 2, "growth": {"kind": "geometric", "factor": 0.0}},
    )
    assert resp.status_code == 400
    assert resp.json()["error"] == "DivergentSchedule"


def test_reproduce_endpoint(client):
    data = client.post("/reproduce/fig12").json()
    assert data["figure"] == "fig12"
    assert data["columns"] == ["epoch", "cumulative_rate1", "baseline_rate1"]
    assert len(data["rows"]) == 80
    assert data["parameters"]["alpha1"] == 0.22


def test_reproduce_unknown_figure(client):
    resp = client.post("/reproduce/fig10")
    assert resp.status_code == 404
    assert resp.json()["error"] == "UnknownFigure"
