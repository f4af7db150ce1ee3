"""HTTP API surface: uploads, profiles, queries, grading, benchmark runs."""

import hashlib
import json

import pytest
from fastapi.testclient import TestClient

from tabletalk.bench import cities_csv_path, cities_rules_path, mini_gold_rules_path, mini_manifest_path
from tabletalk.config import AppConfig
from tabletalk.service import create_app
from tabletalk.tokens import estimate_tokens


def make_client(**config_kwargs) -> TestClient:
    return TestClient(create_app(AppConfig(**config_kwargs)))


@pytest.fixture(scope="module")
def client():
    return make_client(script_path=cities_rules_path())


@pytest.fixture(scope="module")
def cities_bytes():
    return cities_csv_path().read_bytes()


@pytest.fixture(scope="module")
def cities_id(client, cities_bytes):
    resp = client.post(
        "/datasets",
        files={"file": ("cities.csv", cities_bytes, "text/csv")},
    )
    assert resp.status_code == 201
    return resp.json()["id"]


class TestHealth:
    def test_health(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok"}

    def test_cors_header(self, client):
        resp = client.get("/health", headers={"origin": "http://example.com"})
        assert resp.headers["access-control-allow-origin"] == "*"


class TestUpload:
    def test_multipart_upload(self, client, cities_bytes, cities_id):
        assert cities_id == hashlib.sha256(cities_bytes).hexdigest()[:12]
        resp = client.post("/datasets", files={"file": ("cities.csv", cities_bytes, "text/csv")})
        body = resp.json()
        assert body == {
            "id": cities_id,
            "name": "cities",
            "rows": 9,
            "columns": 5,
            "size": "Small",
        }

    def test_upload_is_idempotent(self, client, cities_bytes, cities_id):
        again = client.post("/datasets", files={"file": ("other name.csv", cities_bytes, "text/csv")})
        assert again.status_code == 201
        # same bytes land on the same id; the first upload's name wins
        assert again.json()["id"] == cities_id
        assert again.json()["name"] == "cities"

    def test_raw_body_upload_with_name_header(self):
        client = make_client()
        resp = client.post(
            "/datasets",
            content=b"a,b\n1,x\n",
            headers={"x-dataset-name": "exports/Quarterly Numbers.csv"},
        )
        assert resp.status_code == 201
        assert resp.json()["name"] == "Quarterly Numbers"
        assert resp.json()["rows"] == 1

    def test_raw_body_upload_default_name(self):
        client = make_client()
        resp = client.post("/datasets", content=b"a,b\n1,x\n")
        assert resp.status_code == 201
        assert resp.json()["name"] == "dataset"

    def test_empty_body_rejected(self):
        client = make_client()
        resp = client.post("/datasets", content=b"")
        assert resp.status_code == 400
        assert resp.json() == {
            "failure": {"kind": "validation-error", "detail": "upload body is empty"}
        }

    def test_multipart_without_file_part(self):
        client = make_client()
        resp = client.post("/datasets", files={"other": ("x.csv", b"a\n1\n", "text/csv")})
        assert resp.status_code == 400
        assert resp.json()["failure"] == {
            "kind": "validation-error",
            "detail": "multipart upload needs a 'file' part",
        }

    def test_bad_csv_is_a_load_error(self):
        client = make_client()
        resp = client.post("/datasets", content=b"a,b\n1\n")
        assert resp.status_code == 400
        failure = resp.json()["failure"]
        assert failure["kind"] == "load-error"
        assert "fields, expected" in failure["detail"]

    def test_lenient_flag_reaches_the_loader(self):
        # mostly-numeric column: strict keeps it Categorical, lenient coerces
        data = b"a,b\n1,x\n2,y\noops,z\n"
        strict = make_client().post("/datasets", content=data)
        assert strict.status_code == 201
        lenient = make_client().post("/datasets?lenient=true", content=data)
        assert lenient.status_code == 201
        assert strict.json()["id"] == lenient.json()["id"]

    def test_listing_shows_uploads(self, client, cities_id):
        resp = client.get("/datasets")
        assert resp.status_code == 200
        listed = {d["id"]: d for d in resp.json()["datasets"]}
        assert listed[cities_id]["name"] == "cities"
        assert listed[cities_id]["rows"] == 9


class TestProfile:
    def test_full_profile(self, client, cities_id):
        resp = client.get(f"/datasets/{cities_id}/profile")
        assert resp.status_code == 200
        body = resp.json()
        assert body["id"] == cities_id
        assert body["level"] == 0
        assert "head (5 rows):" in body["profile"]
        assert body["tokens"] == estimate_tokens(body["profile"])

    def test_small_budget_degrades(self, client, cities_id):
        full = client.get(f"/datasets/{cities_id}/profile").json()
        resp = client.get(f"/datasets/{cities_id}/profile", params={"budget": full["tokens"] - 1})
        assert resp.status_code == 200
        body = resp.json()
        assert body["level"] >= 1
        assert "head (5 rows):" not in body["profile"]

    def test_budget_too_small(self, client, cities_id):
        resp = client.get(f"/datasets/{cities_id}/profile", params={"budget": 1})
        assert resp.status_code == 422
        assert resp.json()["failure"]["kind"] == "budget-error"

    def test_budget_must_be_positive(self, client, cities_id):
        resp = client.get(f"/datasets/{cities_id}/profile", params={"budget": 0})
        assert resp.status_code == 400
        assert resp.json()["failure"] == {
            "kind": "validation-error",
            "detail": "budget must be a positive integer",
        }

    def test_unknown_dataset(self, client):
        resp = client.get("/datasets/feedfacecafe/profile")
        assert resp.status_code == 404
        assert resp.json()["failure"] == {
            "kind": "not-found",
            "detail": "no dataset with id 'feedfacecafe'",
        }


class TestQuery:
    def test_scripted_answer_with_plan_trace(self, client, cities_id):
        resp = client.post(
            "/query",
            json={"dataset_id": cities_id, "question": "Which City has the highest Temp?"},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["dataset_id"] == cities_id
        assert body["answer"] == {"kind": "text", "value": "Dubai"}
        assert body["answer_text"] == "Dubai"
        assert len(body["plan"]) == 1
        step = body["plan"][0]
        assert step["index"] == 1
        assert step["rationale"] == "find the row with the highest Temp"
        assert step["op"] == "ARG_EXTREME(col=Temp, mode=max, return_col=City) ON TABLE"
        assert step["result"] == "Dubai"

    def test_unknown_dataset(self, client):
        resp = client.post("/query", json={"dataset_id": "nope", "question": "How many rows?"})
        assert resp.status_code == 404
        assert resp.json()["failure"]["kind"] == "not-found"

    def test_unplannable_question(self, client, cities_id):
        resp = client.post(
            "/query", json={"dataset_id": cities_id, "question": "Write me a poem about wind."}
        )
        assert resp.status_code == 422
        failure = resp.json()["failure"]
        assert failure["kind"] == "generation-error"
        assert failure["detail"].startswith("no valid plan after 3 attempts")

    def test_budget_override(self, client, cities_id):
        resp = client.post(
            "/query",
            json={
                "dataset_id": cities_id,
                "question": "Which City has the highest Temp?",
                "budget": 24,
            },
        )
        assert resp.status_code == 422
        assert resp.json()["failure"]["kind"] == "budget-error"

    def test_empty_question_is_a_validation_error(self, client, cities_id):
        resp = client.post("/query", json={"dataset_id": cities_id, "question": ""})
        assert resp.status_code == 400
        assert resp.json()["failure"]["kind"] == "validation-error"

    def test_zero_budget_is_a_validation_error(self, client, cities_id):
        resp = client.post(
            "/query",
            json={"dataset_id": cities_id, "question": "Which City has the highest Temp?", "budget": 0},
        )
        assert resp.status_code == 400
        assert resp.json()["failure"]["kind"] == "validation-error"

    def test_backend_without_rules_is_a_backend_error(self, cities_bytes):
        client = make_client()
        dataset_id = client.post("/datasets", content=cities_bytes).json()["id"]
        resp = client.post(
            "/query", json={"dataset_id": dataset_id, "question": "Which City has the highest Temp?"}
        )
        assert resp.status_code == 422
        failure = resp.json()["failure"]
        assert failure["kind"] == "backend-error"
        assert failure["detail"].startswith("no rule matched prompt starting")


class TestCheck:
    def _check(self, client, predicted, truth, **extra):
        return client.post("/check", json={"predicted": predicted, "truth": truth, **extra})

    def test_number_within_default_margin(self, client):
        resp = self._check(
            client,
            {"kind": "number", "value": 100.0000001},
            {"kind": "number", "value": 100.0},
        )
        assert resp.status_code == 200
        assert resp.json() == {"correct": True, "reason": ""}

    def test_number_outside_margin(self, client):
        resp = self._check(
            client, {"kind": "number", "value": 100.01}, {"kind": "number", "value": 100.0}
        )
        assert resp.json() == {
            "correct": False,
            "reason": "100.01 is outside the margin around 100",
        }

    def test_explicit_margin_wins(self, client):
        resp = self._check(
            client,
            {"kind": "number", "value": 100.01},
            {"kind": "number", "value": 100.0, "margin": 0.001},
        )
        assert resp.json() == {"correct": True, "reason": ""}

    def test_order_insensitive_text_list(self, client):
        resp = self._check(
            client,
            {"kind": "text_list", "value": ["b", "a"]},
            {"kind": "text_list", "value": ["a", "b"]},
            order_insensitive=True,
        )
        assert resp.json() == {"correct": True, "reason": ""}

    def test_map_grading(self, client):
        resp = self._check(
            client,
            {"kind": "map", "value": {"Sun": 35.3}},
            {"kind": "map", "value": {"Sun": 35.3, "Shade": 15.9}},
        )
        assert resp.json()["correct"] is False
        assert "missing keys" in resp.json()["reason"]

    def test_bad_predicted_value(self, client):
        resp = self._check(
            client, {"kind": "number", "value": "abc"}, {"kind": "number", "value": 1.0}
        )
        assert resp.status_code == 400
        failure = resp.json()["failure"]
        assert failure["kind"] == "validation-error"
        assert failure["detail"].startswith("bad predicted value:")

    def test_bad_ground_truth(self, client):
        resp = self._check(
            client, {"kind": "number", "value": 1.0}, {"kind": "map", "value": 42}
        )
        assert resp.status_code == 400
        assert resp.json()["failure"]["detail"].startswith("bad ground truth:")

    def test_unknown_kind_rejected_by_schema(self, client):
        resp = self._check(
            client, {"kind": "table", "value": 1}, {"kind": "number", "value": 1.0}
        )
        assert resp.status_code == 400
        assert resp.json()["failure"]["kind"] == "validation-error"

    def test_negative_margin_rejected(self, client):
        resp = self._check(
            client,
            {"kind": "number", "value": 1.0},
            {"kind": "number", "value": 1.0, "margin": -0.5},
        )
        assert resp.status_code == 400
        assert resp.json()["failure"]["kind"] == "validation-error"

    def test_none_outcome_is_gradable(self, client):
        resp = self._check(
            client,
            {"kind": "none", "value": "no missing values"},
            {"kind": "text", "value": "Item"},
        )
        assert resp.json() == {
            "correct": False,
            "reason": "no answer produced (no missing values)",
        }


class TestBenchRun:
    def test_gold_run_scores_everything(self):
        client = make_client(script_path=mini_gold_rules_path())
        resp = client.post("/bench/run", json={"manifest_path": str(mini_manifest_path())})
        assert resp.status_code == 200
        body = resp.json()
        assert body["overall"] == {"correct": 30, "total": 30, "percent": 100.0}
        assert body["small"] == {"correct": 10, "total": 10, "percent": 100.0}
        assert len(body["cases"]) == 30
        assert all(case["correct"] for case in body["cases"])

    def test_missing_manifest(self, client):
        resp = client.post("/bench/run", json={"manifest_path": "/nowhere/manifest.json"})
        assert resp.status_code == 400
        failure = resp.json()["failure"]
        assert failure["kind"] == "suite-error"
        assert failure["detail"].startswith("cannot read manifest")
