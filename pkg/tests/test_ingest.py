import json
import math
import random
from collections import Counter

import pytest

from cwemap.corpus import RecordState
from cwemap.errors import ServiceError
from cwemap.ingest import (
    Candidate,
    FetchFailed,
    FeedRecord,
    SnapshotStore,
    filter_accepted,
    narrow_candidates,
    parse_feed,
    parse_nvd_labels,
    scrape_many,
    scrape_nvd,
)
from cwemap.preprocess import tokenize

MINA_TEXT = (
    "A vulnerability in sshd-core of Apache Mina SSHD allows an attacker to "
    "overflow the server causing an OutOfMemory error. This issue affects the "
    "SFTP and port forwarding features of Apache Mina SSHD version 2.0.0 and "
    "later versions. It was addressed in Apache Mina SSHD 2.7.0")

FONT_TEXT = (
    "A remote code execution vulnerability exists when the Windows font "
    "library improperly handles specially crafted fonts.For all systems "
    "except Windows 10, an attacker who successfully exploited the "
    "vulnerability could execute code remotely, aka 'Windows Font Library "
    "Remote Code Execution Vulnerability'")


def write_v4(dirpath, cve_id, state="PUBLIC", description=FONT_TEXT, title=""):
    year = cve_id.split("-")[1]
    sub = dirpath / year / "fixtures"
    sub.mkdir(parents=True, exist_ok=True)
    doc = {
        "CVE_data_meta": {"ID": cve_id, "STATE": state, "ASSIGNER": "cve@example.com"},
        "description": {"description_data": [{"lang": "eng", "value": description}]},
        "references": {"reference_data": [{"url": "https://example.com/adv"}]},
    }
    if title:
        doc["CVE_data_meta"]["TITLE"] = title
    (sub / f"{cve_id}.json").write_text(json.dumps(doc))


def write_v5(dirpath, cve_id, state="PUBLISHED", description=MINA_TEXT):
    sub = dirpath / cve_id.split("-")[1]
    sub.mkdir(parents=True, exist_ok=True)
    doc = {
        "cveMetadata": {"cveId": cve_id, "state": state, "assignerShortName": "mitre"},
        "containers": {"cna": {
            "title": "Apache Mina SSHD advisory",
            "descriptions": [{"lang": "en", "value": description}],
            "references": [{"url": "https://example.org/x"}],
        }},
    }
    (sub / f"{cve_id}.json").write_text(json.dumps(doc))


class TestParseFeed:
    def test_parses_both_schemas(self, tmp_path):
        write_v4(tmp_path, "CVE-2020-13821", description=FONT_TEXT)
        write_v5(tmp_path, "CVE-2021-30129")
        records = parse_feed(tmp_path)
        assert [r.cve_id for r in records] == ["CVE-2020-13821", "CVE-2021-30129"]
        assert records[0].state == RecordState.ACCEPTED
        assert "font library" in records[0].description

    def test_rejected_record_excluded_by_filter(self, tmp_path):
        write_v4(tmp_path, "CVE-2020-1000", state="REJECT")
        write_v4(tmp_path, "CVE-2020-1001", state="PUBLIC")
        records = parse_feed(tmp_path)
        assert {r.cve_id for r in records} == {"CVE-2020-1000", "CVE-2020-1001"}
        kept = filter_accepted(records)
        assert [r.cve_id for r in kept] == ["CVE-2020-1001"]

    def test_reserved_state(self, tmp_path):
        write_v4(tmp_path, "CVE-2021-0042", state="RESERVED", description="x y z")
        assert parse_feed(tmp_path)[0].state == RecordState.RESERVED

    def test_empty_directory(self, tmp_path):
        assert parse_feed(tmp_path) == []

    def test_missing_description_dropped(self, tmp_path):
        write_v4(tmp_path, "CVE-2020-2000", description="")
        assert parse_feed(tmp_path) == []

    def test_unreadable_and_schema_violation_skipped(self, tmp_path):
        sub = tmp_path / "2020"
        sub.mkdir()
        (sub / "CVE-2020-3000.json").write_text("{not json")
        (sub / "CVE-2020-3001.json").write_text(json.dumps({"something": "else"}))
        write_v4(tmp_path, "CVE-2020-3002")
        assert [r.cve_id for r in parse_feed(tmp_path)] == ["CVE-2020-3002"]

    def test_year_restriction(self, tmp_path):
        write_v4(tmp_path, "CVE-2019-0001", description="a b c")
        write_v4(tmp_path, "CVE-2020-0002", description="a b c")
        write_v4(tmp_path, "CVE-2021-0003", description="a b c")
        records = parse_feed(tmp_path, years=(2020, 2021))
        assert [r.cve_id for r in records] == ["CVE-2020-0002", "CVE-2021-0003"]

    def test_filter_idempotent(self, tmp_path):
        write_v4(tmp_path, "CVE-2020-1001")
        records = parse_feed(tmp_path)
        once = filter_accepted(records)
        assert filter_accepted(once) == once


def tfidf_oracle(records, catalog, stopwords=None):
    """Brute-force TF.IDF over the term-document matrix, dict arithmetic."""
    docs = {c.cwe_id: Counter(tokenize(c.text, stopwords)) for c in catalog.collate_all()}
    n = 25
    df = Counter()
    for freqs in docs.values():
        for t in freqs:
            df[t] += 1
    idf = {t: math.log(n / (1 + d)) + 1.0 for t, d in df.items()}
    oov = math.log(n / 1.0) + 1.0

    doc_vecs = {}
    for cwe_id, freqs in docs.items():
        vec = {t: c * idf[t] for t, c in freqs.items()}
        norm = math.sqrt(sum(v * v for v in vec.values()))
        doc_vecs[cwe_id] = {t: v / norm for t, v in vec.items()}

    out = []
    for rec in records:
        cve = rec.record if isinstance(rec, FeedRecord) else rec
        counts = Counter(tokenize(cve.text, stopwords))
        if not counts:
            continue
        qvec = {t: c * idf.get(t, oov) for t, c in counts.items()}
        qnorm = math.sqrt(sum(v * v for v in qvec.values()))
        best_rank, best_score = None, -1.0
        for rank in range(1, 26):
            dvec = doc_vecs[catalog.by_rank(rank).cwe_id]
            sim = sum(qv * dvec.get(t, 0.0) for t, qv in qvec.items()) / qnorm
            if sim > best_score + 1e-15:
                best_rank, best_score = rank, sim
        out.append((cve.cve_id, best_rank, best_score))
    out.sort(key=lambda c: (-c[2], c[0]))
    return out


def make_record(cve_id, description, title=""):
    return FeedRecord(cve_id, title, description, RecordState.ACCEPTED)


class TestNarrowCandidates:
    def test_verbatim_cwe_text_self_match(self, catalog):
        sqli = catalog.by_rank(3)
        rec = make_record("CVE-2020-9999", f"{sqli.name} {sqli.description}")
        out = narrow_candidates([rec], catalog)
        assert out[0].best_rank == 3
        assert out[0].score > 0.5

    def test_zero_overlap_scores_zero(self, catalog):
        rec = make_record("CVE-2020-8888", "zzzz qqqq wwww qwerty")
        out = narrow_candidates([rec], catalog)
        assert out[0].score == 0.0
        assert narrow_candidates([rec], catalog, min_score=1e-9) == []

    def test_matches_bruteforce_oracle(self, catalog):
        rng = random.Random(7)
        vocab = ("sql injection overflow buffer authentication upload race "
                 "request forgery path traversal memory code attacker web "
                 "server xml entity pointer free credentials permissions").split()
        records = []
        for i in range(5):
            words = rng.choices(vocab, k=rng.randint(5, 30))
            records.append(make_record(f"CVE-2021-{1000 + i}", " ".join(words)))
        ours = narrow_candidates(records, catalog)
        oracle = tfidf_oracle(records, catalog)
        assert [(c.cve_id, c.best_rank) for c in ours] == \
            [(cid, rank) for cid, rank, _ in oracle]
        for c, (_, _, score) in zip(ours, oracle):
            assert c.score == pytest.approx(score, abs=1e-9)

    def test_empty_text_dropped(self, catalog):
        rec = make_record("CVE-2020-7777", "the and a of")  # all stopwords
        assert narrow_candidates([rec], catalog) == []

    def test_top_n_and_determinism(self, catalog):
        records = [
            make_record("CVE-2020-0001", "sql injection in web application"),
            make_record("CVE-2020-0002", "buffer overflow write memory"),
            make_record("CVE-2020-0003", "cross-site request forgery token"),
        ]
        full = narrow_candidates(records, catalog)
        again = narrow_candidates(records, catalog)
        assert full == again
        top2 = narrow_candidates(records, catalog, top_n=2)
        assert top2 == full[:2]


def nvd_page(rows):
    trs = "".join(
        f'<tr><td><a href="https://cwe.example/{c}">{c}</a></td><td>{n}</td></tr>'
        for c, n in rows)
    return (f"<html><body><h1>Detail</h1>"
            f'<table data-testid="vuln-CWEs-table"><thead></thead>{trs}</table>'
            f"<p>CWE-999 outside the section</p></body></html>").encode()


class TestScrape:
    def test_single_label_page(self):
        body = nvd_page([("CWE-79", "Cross-site Scripting")])
        snap = scrape_nvd("CVE-2022-36796", lambda _: body)
        assert snap.parsed_labels == {"CWE-79"}
        assert not snap.flagged

    def test_non_top25_labels_retained(self):
        body = nvd_page([
            ("CWE-191", "Integer Underflow"),
            ("CWE-119", "Improper Restriction of Operations"),
            ("CWE-122", "Heap-based Buffer Overflow"),
        ])
        snap = scrape_nvd("CVE-2020-15158", lambda _: body)
        assert snap.parsed_labels == {"CWE-191", "CWE-119", "CWE-122"}

    def test_labels_appear_verbatim_in_page(self):
        body = nvd_page([("CWE-79", "XSS"), ("CWE-352", "CSRF")])
        snap = scrape_nvd("CVE-2021-0011", lambda _: body)
        text = body.decode()
        assert all(label in text for label in snap.parsed_labels)

    def test_malformed_page_flagged(self, tmp_path):
        store = SnapshotStore(tmp_path)
        snap = scrape_nvd("CVE-2021-0002", lambda _: b"<html>no weakness table</html>",
                          store=store)
        assert snap.flagged
        assert snap.parsed_labels == frozenset()
        assert store.load("CVE-2021-0002").flagged

    def test_fetch_failure_retries_then_raises(self):
        calls = []

        def failing(cve_id):
            calls.append(cve_id)
            raise ConnectionError("boom")

        with pytest.raises(FetchFailed):
            scrape_nvd("CVE-2021-0003", failing, retries=3, backoff=0.001)
        assert len(calls) == 3

    def test_retry_succeeds_after_transient_failure(self):
        attempts = iter([ConnectionError("x"), nvd_page([("CWE-79", "n")])])

        def flaky(cve_id):
            item = next(attempts)
            if isinstance(item, Exception):
                raise item
            return item

        snap = scrape_nvd("CVE-2021-0004", flaky, retries=3, backoff=0.001)
        assert snap.parsed_labels == {"CWE-79"}

    def test_store_replay_reproduces_labels(self, tmp_path):
        store = SnapshotStore(tmp_path)
        body = nvd_page([("CWE-89", "SQL Injection")])
        first = scrape_nvd("CVE-2020-0005", lambda _: body, store=store)
        replayed = scrape_many(["CVE-2020-0005"], store.fetcher(), store)
        assert replayed["CVE-2020-0005"].parsed_labels == first.parsed_labels
        assert replayed["CVE-2020-0005"].fetched_at == first.fetched_at

    def test_store_fetcher_missing_snapshot(self, tmp_path):
        store = SnapshotStore(tmp_path)
        with pytest.raises(ServiceError):
            scrape_nvd("CVE-2020-0006", store.fetcher(), retries=1, backoff=0)

    def test_scrape_many_writes_all(self, tmp_path):
        store = SnapshotStore(tmp_path)
        body = nvd_page([("CWE-20", "Improper Input Validation")])
        snaps = scrape_many(["CVE-2020-0007", "CVE-2020-0008"], lambda _: body, store,
                            concurrency=2)
        assert set(snaps) == {"CVE-2020-0007", "CVE-2020-0008"}
        assert store.has("CVE-2020-0007") and store.has("CVE-2020-0008")

    def test_parse_nvd_labels_no_section(self):
        assert parse_nvd_labels(b"<html></html>") is None
