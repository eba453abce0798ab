"""Sidecar acceptance: protocol conformance of the live service."""

import json
import socket
import threading
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from embedsvc.encoder import HashingEncoder
from embedsvc.service import create_app
from embedsvc.store import export_store, load_sentence_file

REPO_ROOT = Path(__file__).resolve().parents[2]
RECORDED_REQUEST = REPO_ROOT / "tests" / "fixtures" / "scorer" / "request.json"


@contextmanager
def live_sidecar(app):
    import uvicorn

    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port,
                                           log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("sidecar never started")
        time.sleep(0.05)
    try:
        yield f"http://127.0.0.1:{port}"
    finally:
        server.should_exit = True
        thread.join(timeout=5)


def report(name, detail=""):
    print(f"\n[ACCEPTANCE PASS] {name}" + (f" :: {detail}" if detail else ""))


class TestSidecarAcceptance:
    def test_identical_text_cosine(self):
        """Identical texts embed to cosine 1.0 within 1e-6."""
        client = TestClient(create_app(HashingEncoder(dim=256)))
        body = client.post("/embed", json={"texts": ["null pointer dereference"] * 2}).json()
        a, b = (np.array(v) for v in body["vectors"])
        cos = float(a @ b)
        assert cos == pytest.approx(1.0, abs=1e-6)
        report("identical-text cosine", f"{cos:.9f}")

    def test_export_store_loads_into_primary(self, tmp_path):
        """export_store output loads into the ranking toolkit's store; dim
        constant across lines."""
        cwemap_rank = pytest.importorskip("cwemap.rank")
        sentences = {
            "cve:CVE-2021-0001": ["First sentence.", "Second sentence."],
            "cwe:CWE-79": ["One.", "Two.", "Three."],
        }
        out = tmp_path / "store.jsonl"
        n = export_store(HashingEncoder(dim=128), sentences, out)
        assert n == 5
        dims = {json.loads(l)["dim"] for l in out.read_text().splitlines()}
        assert dims == {128}
        store = cwemap_rank.EmbeddingStore.load(out)
        assert store.dim == 128
        report("store export", "5 vectors, dim constant, loads into primary")

    def test_exported_store_drives_primary_cosine_ranker(self, tmp_path):
        """A store exported for a real record and the full catalog feeds the
        primary's cosine ranker end to end."""
        cwemap_rank = pytest.importorskip("cwemap.rank")
        cwemap_corpus = pytest.importorskip("cwemap.corpus")
        from cwemap.preprocess import cleanup, segment_sentences

        catalog = cwemap_corpus.load_catalog()
        cve = cwemap_corpus.CveRecord(
            "CVE-2021-31001", "",
            "An out-of-bounds read was found in the parser. A remote attacker "
            "could obtain sensitive information. The read happens past the "
            "end of a buffer.")
        sentences = {"cve:CVE-2021-31001":
                     segment_sentences(cleanup(cve.text).output)}
        for collated in catalog.collate_all():
            sentences[f"cwe:{collated.cwe_id}"] = list(collated.sentences)
        out = tmp_path / "store.jsonl"
        export_store(HashingEncoder(dim=256), sentences, out)

        store = cwemap_rank.EmbeddingStore.load(out)
        ranked = cwemap_rank.cosine_sentence_rank(cve, catalog, store)
        assert sorted(r for r, _ in ranked.entries) == list(range(1, 26))
        assert ranked.to_json() == cwemap_rank.cosine_sentence_rank(
            cve, catalog, store).to_json()
        report("store-driven cosine ranking",
               f"top rank {ranked.entries[0][0]}")

    def test_live_sidecar_passes_primary_contract(self):
        """The primary's recorded-fixture flow works against the live
        sidecar: same request fixture, real socket, valid RankedList."""
        cwemap_rank = pytest.importorskip("cwemap.rank")
        cwemap_corpus = pytest.importorskip("cwemap.corpus")

        recorded = json.loads(RECORDED_REQUEST.read_text())
        catalog = cwemap_corpus.load_catalog()
        cve = cwemap_corpus.CveRecord("CVE-2021-44042", "", recorded["query"])

        with live_sidecar(create_app(HashingEncoder(dim=256))) as endpoint:
            first = cwemap_rank.external_rank(cve, catalog, endpoint,
                                              preprocess=False)
            second = cwemap_rank.external_rank(cve, catalog, endpoint,
                                               preprocess=False)
        assert first.to_json() == second.to_json()
        assert sorted(r for r, _ in first.entries) == list(range(1, 26))
        scores = [s for _, s in first.entries]
        assert scores == sorted(scores, reverse=True)
        report("live sidecar contract",
               f"top entry rank {first.entries[0][0]} score {first.entries[0][1]:.4f}")
