import json
import math
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from embedsvc.encoder import HashingEncoder
from embedsvc.service import create_app, split_sentences

REPO_ROOT = Path(__file__).resolve().parents[2]
RECORDED_REQUEST = REPO_ROOT / "tests" / "fixtures" / "scorer" / "request.json"
GOLDEN_RESPONSE = Path(__file__).parent / "fixtures" / "score_response.json"


@pytest.fixture()
def client():
    return TestClient(create_app(HashingEncoder(dim=256)))


class TestEmbed:
    def test_identical_texts_cosine_one(self, client):
        resp = client.post("/embed", json={"texts": ["use after free"] * 2})
        assert resp.status_code == 200
        body = resp.json()
        assert body["dim"] == 256
        a, b = (np.array(v) for v in body["vectors"])
        cos = float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))
        assert cos == pytest.approx(1.0, abs=1e-6)

    def test_empty_list_400(self, client):
        assert client.post("/embed", json={"texts": []}).status_code == 400

    def test_empty_text_400(self, client):
        assert client.post("/embed", json={"texts": ["ok", " "]}).status_code == 400

    def test_unnormalized(self, client):
        resp = client.post("/embed", json={"texts": ["a b c"], "normalize": False})
        vec = np.array(resp.json()["vectors"][0])
        assert np.linalg.norm(vec) > 1.0  # raw counts, not unit length

    def test_healthz(self, client):
        body = client.get("/healthz").json()
        assert body == {"model": "hash:256", "dim": 256}


class TestScoreBatch:
    def docs(self, n=3):
        return [{"id": f"CWE-{100 + i}", "text": f"Weakness text number {i}. More words here."}
                for i in range(n)]

    def test_query_equal_to_document_scores_max(self, client):
        docs = self.docs()
        resp = client.post("/score_batch", json={"query": docs[1]["text"],
                                                 "documents": docs})
        scores = {s["id"]: s["score"] for s in resp.json()["scores"]}
        assert scores["CWE-101"] == pytest.approx(1.0, abs=1e-9)
        assert scores["CWE-101"] == max(scores.values())

    def test_25_documents_in_25_scores_out(self, client):
        docs = self.docs(25)
        resp = client.post("/score_batch", json={"query": "some issue", "documents": docs})
        body = resp.json()
        assert len(body["scores"]) == 25
        assert [s["id"] for s in body["scores"]] == [d["id"] for d in docs]
        assert all(math.isfinite(s["score"]) for s in body["scores"])

    def test_malformed_request_400(self, client):
        assert client.post("/score_batch", json={"query": "x"}).status_code == 422
        assert client.post("/score_batch",
                           json={"query": " ", "documents": self.docs()}).status_code == 400
        assert client.post("/score_batch",
                           json={"query": "x", "documents": []}).status_code == 400

    def test_sentence_splitter(self):
        assert split_sentences("One thing. Another thing.") == \
            ["One thing.", "Another thing."]
        assert split_sentences("version 2.7.0 fixed") == ["version 2.7.0 fixed"]
        assert split_sentences("") == []


class TestRecordedContract:
    """The same recorded fixtures the primary's mock tests use."""

    def test_recorded_request_conforms(self, client):
        recorded = json.loads(RECORDED_REQUEST.read_text())
        resp = client.post("/score_batch", json=recorded)
        assert resp.status_code == 200
        scores = resp.json()["scores"]
        assert len(scores) == 25
        assert {s["id"] for s in scores} == {d["id"] for d in recorded["documents"]}
        assert all(math.isfinite(s["score"]) for s in scores)

    def test_golden_replay_identical(self, client):
        recorded = json.loads(RECORDED_REQUEST.read_text())
        resp = client.post("/score_batch", json=recorded)
        assert resp.json() == json.loads(GOLDEN_RESPONSE.read_text())
