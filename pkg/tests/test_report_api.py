import pytest
from fastapi.testclient import TestClient

from walkmax.report_api import app


@pytest.fixture
def client():
    return TestClient(app)


def test_root(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["status"] == "operational"


def test_health(client):
    assert client.get("/health").json() == {"status": "healthy"}


def test_joint(client):
    response = client.get("/joint", params={"p": "1/2", "q": "1/2", "t": 2})
    assert response.status_code == 200
    body = response.json()
    assert body["states"] == 4
    assert body["header"]["command"] == "joint"


def test_doob_equality(client):
    response = client.get("/doob", params={"p": "1/2", "q": "1/2", "t": 10, "lambda": "3"})
    assert response.status_code == 200
    rows = response.json()["rows"]
    assert len(rows) == 1
    assert rows[0]["relation"] == "="
    assert rows[0]["lambda"] == "3"


def test_kennedy(client):
    response = client.get("/kennedy", params={"p": "1/2", "q": "1/2", "a": "1", "b": "1/2", "n": 1})
    assert response.status_code == 200
    assert response.json()["pgf"] == pytest.approx(1 / 3)


def test_kennedy_regime_error(client):
    response = client.get("/kennedy", params={"p": "1/2", "q": "1/2", "a": "1", "b": "1", "n": 1})
    assert response.status_code == 422


def test_bad_probability(client):
    response = client.get("/joint", params={"p": "0.5", "q": "1/2", "t": 2})
    assert response.status_code == 422


def test_embed_exact(client):
    measure = {"kind": "finite", "atoms": [{"x": -3, "mass": "1/4"}, {"x": 1, "mass": "3/4"}]}
    response = client.post("/embed", json={"measure": measure, "p": "1/2", "q": "1/2"})
    assert response.status_code == 200
    body = response.json()
    assert body["passed"]
    assert body["expected_T"] == "3"


def test_embed_rejects_bad_measure(client):
    measure = {"kind": "finite", "atoms": [{"x": x, "mass": "1/3"} for x in (-1, 0, 1)]}
    response = client.post("/embed", json={"measure": measure, "p": "1/2", "q": "1/2"})
    assert response.status_code == 422
    assert "(A2)" in response.json()["detail"]


def test_embed_rejects_unknown_fields(client):
    response = client.post("/embed", json={"measure": {}, "p": "1/2", "q": "1/2", "colour": "red"})
    assert response.status_code == 422
