import pytest
from fastapi.testclient import TestClient

from resplan.actions import canonical_catalog
from resplan.config import AppConfig
from resplan.service.app import create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(AppConfig(data_dir=tmp_path / "data"))
    with TestClient(app) as client:
        yield client


def test_get_actions(client):
    payload = client.get("/actions").json()
    assert payload["weight_source"] == "topsis_engine"
    assert len(payload["actions"]) == 10
    full_closure = payload["actions"][9]
    assert full_closure["name"] == "Full Road Closure"
    assert full_closure["weight"] == pytest.approx(1.0)


def test_topsis_weights_endpoint(client):
    request = {
        "criteria": [
            {"name": "Impact", "weight": 0.7, "kind": "Benefit"},
            {"name": "Resource Engagement", "weight": 0.3, "kind": "Benefit"},
        ],
        "alternatives": [
            {"label": a.name, "values": [a.impact, a.resource_engagement]}
            for a in canonical_catalog()
        ],
    }
    response = client.post("/topsis/weights", json=request)
    assert response.status_code == 200
    weights = {w["label"]: w["weight"] for w in response.json()["weights"]}
    assert weights["Deploy IRV"] == pytest.approx(0.861632, abs=1e-6)


def test_topsis_weights_rejects_zero_column(client):
    request = {
        "criteria": [{"name": "c", "weight": 1.0}],
        "alternatives": [{"label": "a", "values": [0.0]}],
    }
    assert client.post("/topsis/weights", json=request).status_code == 400


def test_score_contract(client):
    response = client.post("/plans/score", json={"bits": [1] + [0] * 9})
    assert response.status_code == 200
    payload = response.json()
    assert set(payload) == {"score", "per_action"}
    assert payload["score"] == pytest.approx(0.861632, abs=1e-6)
    first = payload["per_action"][0]
    assert set(first) == {"index", "name", "weight", "included"}
    assert first["included"] is True


def test_score_rejects_bad_bits(client):
    assert client.post("/plans/score", json={"bits": [1, 2, 3]}).status_code == 400
    assert client.post("/plans/score", json={"bits": [1, 0]}).status_code == 400


def test_fuse_endpoint_and_score_parity(client):
    plans = [[1, 0, 1, 1, 0, 1, 0, 1, 0, 1],
             [1, 1, 0, 1, 1, 0, 1, 0, 1, 0],
             [0, 1, 1, 0, 0, 1, 1, 1, 0, 1]]
    fused = client.post("/plans/fuse", json={"plans": plans}).json()
    rescored = client.post("/plans/score", json={"bits": fused["bits"]}).json()
    assert fused["score"] == rescored["score"]
    assert fused["source"] == "fused(3)"


def test_fuse_rejects_mixed_lengths(client):
    response = client.post("/plans/fuse", json={"plans": [[1, 0], [1, 0, 1]]})
    assert response.status_code == 400


def test_fuse_rejects_empty(client):
    assert client.post("/plans/fuse", json={"plans": []}).status_code == 400


def test_generate_and_fetch_job(client):
    response = client.post("/plans/generate", json={"incident_id": "A-2760450"})
    assert response.status_code == 200
    job = response.json()
    assert job["status"] == "Done"
    assert len(job["result"]["fused_bits"]) == 10
    assert len(job["result"]["generations"]) == 3
    fetched = client.get(f"/jobs/{job['job_id']}").json()
    assert fetched == job


def test_generate_with_inline_record(client):
    record = {"id": "A-INLINE", "description": "Overturned truck on ramp."}
    response = client.post("/plans/generate", json={"record": record, "m": 1})
    assert response.status_code == 200
    assert response.json()["incident_id"] == "A-INLINE"


def test_generate_unknown_incident_404(client):
    response = client.post("/plans/generate", json={"incident_id": "A-0000000"})
    assert response.status_code == 404


def test_generate_requires_exactly_one_incident_form(client):
    assert client.post("/plans/generate", json={}).status_code == 400
    both = {"incident_id": "A-2760450", "record": {"id": "A-X"}}
    assert client.post("/plans/generate", json=both).status_code == 400


def test_get_job_unknown_404(client):
    assert client.get("/jobs/doesnotexist").status_code == 404


def test_get_incident_summary(client):
    payload = client.get("/incidents/A-2760450").json()
    assert "stalled truck" in payload["description"]
    assert payload["report"].startswith("Accident ID: A-2760450, Source: Source2")
    assert client.get("/incidents/A-0000000").status_code == 404


def test_synthesize_endpoint(client):
    response = client.post(
        "/guidelines/synthesize", json={"document": "guideline excerpt"}
    )
    assert response.status_code == 200
    payload = response.json()
    assert payload["schema_version"] == 1
    assert len(payload["rows"]) == 10
    assert payload["rows"][4]["incident_type"] == "Overturned Truck"


def test_synthesize_empty_document_400(client):
    response = client.post("/guidelines/synthesize", json={"document": "  "})
    assert response.status_code == 400


def test_unknown_backend_404(client):
    response = client.post(
        "/plans/generate", json={"incident_id": "A-2760450", "backend": "nope"}
    )
    assert response.status_code == 404
