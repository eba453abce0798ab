"""Feed ingestion, candidate narrowing, and NVD label scraping.

parse_feed reads a directory of per-record CVE JSON documents (the public
cvelist layout, either the 4.0 or the 5.0 record schema), filter_accepted
keeps MITRE-accepted records, narrow_candidates scores records against the
catalog with TF.IDF cosine, and scrape_nvd pulls the NVD-assigned CWE
labels through an injected page fetcher with snapshot caching.
"""

from __future__ import annotations

import csv
import json
import logging
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .corpus import CVE_ID_RE, Catalog, CveRecord, RecordState
from .errors import ServiceError
from .preprocess import tokenize

logger = logging.getLogger(__name__)

Fetcher = Callable[[str], bytes]


@dataclass(frozen=True)
class FeedRecord:
    """One parsed feed document; metadata is retained but unused."""

    cve_id: str
    title: str
    description: str
    state: RecordState
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def record(self) -> CveRecord:
        return CveRecord(self.cve_id, self.title, self.description, self.state)


_STATE_MAP = {
    "PUBLIC": RecordState.ACCEPTED,      # 4.0 schema
    "PUBLISHED": RecordState.ACCEPTED,   # 5.0 schema
    "REJECT": RecordState.REJECTED,
    "REJECTED": RecordState.REJECTED,
    "RESERVED": RecordState.RESERVED,
}


def _extract_v4(doc: dict) -> tuple[str, str, str, str, dict]:
    meta = doc["CVE_data_meta"]
    cve_id = meta["ID"]
    state = meta.get("STATE", "")
    title = meta.get("TITLE", "") or ""
    description = ""
    for d in doc.get("description", {}).get("description_data", []):
        if d.get("lang", "").startswith("en"):
            description = d.get("value", "")
            break
    metadata = {
        "assigner": meta.get("ASSIGNER", ""),
        "urls": [r.get("url", "") for r in
                 doc.get("references", {}).get("reference_data", [])],
    }
    return cve_id, title, description, state, metadata


def _extract_v5(doc: dict) -> tuple[str, str, str, str, dict]:
    meta = doc["cveMetadata"]
    cve_id = meta["cveId"]
    state = meta.get("state", "")
    cna = doc.get("containers", {}).get("cna", {})
    title = cna.get("title", "") or ""
    description = ""
    for d in cna.get("descriptions", []):
        if d.get("lang", "").startswith("en"):
            description = d.get("value", "")
            break
    metadata = {
        "assigner": meta.get("assignerShortName", ""),
        "urls": [r.get("url", "") for r in cna.get("references", [])],
    }
    return cve_id, title, description, state, metadata


def parse_feed(feed_dir: str | Path, years: Iterable[int] | None = None) -> list[FeedRecord]:
    """Parse every CVE-*.json under feed_dir; skip and log broken files.

    `years` restricts by the year embedded in the id (the catalog's coverage
    window); None accepts all years. Records without a description are
    dropped with a logged reason, since they cannot be scored or annotated.
    """
    year_set = set(years) if years is not None else None
    records: list[FeedRecord] = []
    paths = sorted(Path(feed_dir).rglob("CVE-*.json"))
    for path in paths:
        try:
            doc = json.loads(path.read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            logger.warning("skipping unreadable %s: %s", path, exc)
            continue
        try:
            if "CVE_data_meta" in doc:
                cve_id, title, description, state, metadata = _extract_v4(doc)
            elif "cveMetadata" in doc:
                cve_id, title, description, state, metadata = _extract_v5(doc)
            else:
                raise KeyError("no CVE_data_meta or cveMetadata")
            if not CVE_ID_RE.match(cve_id):
                raise ValueError(f"bad id {cve_id!r}")
        except (KeyError, TypeError, ValueError) as exc:
            logger.warning("skipping %s: schema violation: %s", path, exc)
            continue
        if year_set is not None and int(cve_id.split("-")[1]) not in year_set:
            continue
        if not description.strip():
            logger.info("dropping %s: no description", cve_id)
            continue
        records.append(FeedRecord(
            cve_id=cve_id, title=title.strip(), description=description.strip(),
            state=_STATE_MAP.get(state.upper(), RecordState.OTHER), metadata=metadata))
    records.sort(key=lambda r: r.cve_id)
    return records


def filter_accepted(records: Iterable[FeedRecord]) -> list[FeedRecord]:
    """Keep only MITRE-accepted records, in stable cve_id order."""
    return sorted((r for r in records if r.state == RecordState.ACCEPTED),
                  key=lambda r: r.cve_id)


def save_records(records: Iterable[CveRecord | FeedRecord], path: str | Path) -> None:
    """Records file: one JSON object per line, the pipeline's working format."""
    with Path(path).open("w", encoding="utf-8") as f:
        for r in records:
            rec = r.record if isinstance(r, FeedRecord) else r
            f.write(json.dumps({
                "cve_id": rec.cve_id, "title": rec.title,
                "description": rec.description, "state": rec.state.value,
                "nvd_labels": sorted(rec.nvd_labels),
            }, separators=(",", ":")) + "\n")


def load_records(path: str | Path) -> list[CveRecord]:
    records = []
    with Path(path).open(encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            obj = json.loads(line)
            records.append(CveRecord(
                cve_id=obj["cve_id"], title=obj.get("title", ""),
                description=obj["description"],
                state=RecordState(obj.get("state", "accepted")),
                nvd_labels=frozenset(obj.get("nvd_labels", []))))
    return records


@dataclass(frozen=True)
class Candidate:
    cve_id: str
    best_rank: int
    score: float


def narrow_candidates(records: Sequence[FeedRecord], catalog: Catalog,
                      top_n: int | None = None, min_score: float | None = None,
                      stopwords: frozenset[str] | None = None) -> list[Candidate]:
    """Score each record's text against the 25 catalog texts with TF.IDF.

    Texts are lowercased and stopword-filtered; the record score is its best
    cosine against the catalog documents, idf(t) = ln(25/(1+df(t))) + 1 with
    df over the 25 documents. Returns candidates sorted by score descending
    (ties by cve_id), filtered by min_score and/or truncated to top_n.
    Records whose text tokenizes to nothing are dropped with a logged reason.
    """
    doc_tokens = [tokenize(c.text, stopwords) for c in catalog.collate_all()]
    vocab: dict[str, int] = {}
    for toks in doc_tokens:
        for t in toks:
            vocab.setdefault(t, len(vocab))
    n_docs = len(doc_tokens)
    tf = np.zeros((n_docs, len(vocab)), dtype=np.float64)
    for i, toks in enumerate(doc_tokens):
        for t in toks:
            tf[i, vocab[t]] += 1.0
    df = np.count_nonzero(tf, axis=0).astype(np.float64)
    idf = np.log(n_docs / (1.0 + df)) + 1.0
    docs = tf * idf
    norms = np.linalg.norm(docs, axis=1)
    norms[norms == 0.0] = 1.0
    docs /= norms[:, None]

    # idf for query terms outside the catalog vocabulary (df = 0)
    oov_idf = float(np.log(n_docs / 1.0) + 1.0)

    out: list[Candidate] = []
    for rec in records:
        cve = rec.record if isinstance(rec, FeedRecord) else rec
        tokens = tokenize(cve.text, stopwords)
        if not tokens:
            logger.info("dropping %s: empty vocabulary after cleanup", rec.cve_id)
            continue
        qv = np.zeros(len(vocab), dtype=np.float64)
        oov_sq = 0.0
        counts: dict[str, int] = {}
        for t in tokens:
            counts[t] = counts.get(t, 0) + 1
        for t, n in counts.items():
            j = vocab.get(t)
            if j is None:
                oov_sq += (n * oov_idf) ** 2
            else:
                qv[j] = n * idf[j]
        qnorm = float(np.sqrt(qv @ qv + oov_sq))
        if qnorm == 0.0:
            logger.info("dropping %s: empty vocabulary after cleanup", rec.cve_id)
            continue
        sims = docs @ (qv / qnorm)
        best = int(np.argmax(sims))  # argmax returns the first (lowest rank) on ties
        out.append(Candidate(rec.cve_id, best + 1, float(sims[best])))

    out.sort(key=lambda c: (-c.score, c.cve_id))
    if min_score is not None:
        out = [c for c in out if c.score >= min_score]
    if top_n is not None:
        out = out[:top_n]
    return out


def save_candidates(candidates: Iterable[Candidate], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["cve_id", "best_rank", "score"])
        for c in candidates:
            writer.writerow([c.cve_id, c.best_rank, repr(c.score)])


# ---------------------------------------------------------------------------
# NVD scraping with snapshot caching.
# ---------------------------------------------------------------------------

NVD_URL = "https://nvd.nist.gov/vuln/detail/{cve_id}"

_CWE_ID = re.compile(r"CWE-\d+")
# the weakness-enumeration section of the detail page
_WEAKNESS_SECTION = re.compile(
    r"(?:data-testid=\"vuln-CWEs-table\"|id=\"vulnCweTable\")(?P<body>.*?)</table>",
    re.DOTALL | re.IGNORECASE,
)


@dataclass(frozen=True)
class NvdPageSnapshot:
    cve_id: str
    fetched_at: float
    body: bytes
    parsed_labels: frozenset[str]
    flagged: bool = False


class FetchFailed(ServiceError):
    pass


def parse_nvd_labels(body: bytes) -> frozenset[str] | None:
    """CWE ids inside the weakness-enumeration section; None if no section."""
    text = body.decode("utf-8", errors="replace")
    m = _WEAKNESS_SECTION.search(text)
    if m is None:
        return None
    return frozenset(_CWE_ID.findall(m.group("body")))


class RateLimiter:
    """Serializes callers to at most `rps` acquisitions per second."""

    def __init__(self, rps: float = 1.0):
        if rps <= 0:
            raise ValueError("rps must be positive")
        self._interval = 1.0 / rps
        self._lock = threading.Lock()
        self._next_at = 0.0

    def acquire(self) -> None:
        with self._lock:
            now = time.monotonic()
            wait = self._next_at - now
            self._next_at = max(now, self._next_at) + self._interval
        if wait > 0:
            time.sleep(wait)


class SnapshotStore:
    """Directory of {cve_id}.html plus {cve_id}.labels.json.

    Snapshots are immutable; a re-fetch writes a fresh pair. Replaying from
    the store returns exactly the labels recorded at fetch time.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def has(self, cve_id: str) -> bool:
        return (self.root / f"{cve_id}.labels.json").exists()

    def save(self, snap: NvdPageSnapshot) -> None:
        (self.root / f"{snap.cve_id}.html").write_bytes(snap.body)
        payload = {
            "cve_id": snap.cve_id,
            "fetched_at": snap.fetched_at,
            "labels": sorted(snap.parsed_labels),
            "flagged": snap.flagged,
        }
        (self.root / f"{snap.cve_id}.labels.json").write_text(
            json.dumps(payload, indent=2), encoding="utf-8")

    def load(self, cve_id: str) -> NvdPageSnapshot:
        payload = json.loads((self.root / f"{cve_id}.labels.json").read_text("utf-8"))
        body_path = self.root / f"{cve_id}.html"
        body = body_path.read_bytes() if body_path.exists() else b""
        return NvdPageSnapshot(
            cve_id=payload["cve_id"], fetched_at=payload["fetched_at"], body=body,
            parsed_labels=frozenset(payload["labels"]),
            flagged=bool(payload.get("flagged", False)))

    def labels(self) -> dict[str, frozenset[str]]:
        out = {}
        for p in sorted(self.root.glob("*.labels.json")):
            payload = json.loads(p.read_text("utf-8"))
            out[payload["cve_id"]] = frozenset(payload["labels"])
        return out

    def fetcher(self) -> Fetcher:
        """A Fetcher serving stored pages, for offline replay."""
        def fetch(cve_id: str) -> bytes:
            path = self.root / f"{cve_id}.html"
            if not path.exists():
                raise FetchFailed(f"no snapshot for {cve_id}")
            return path.read_bytes()
        return fetch


def url_fetcher(rps: float = 1.0, timeout: float = 30.0) -> Fetcher:
    """Live NVD page fetcher, rate-limited."""
    import httpx

    limiter = RateLimiter(rps)

    def fetch(cve_id: str) -> bytes:
        limiter.acquire()
        resp = httpx.get(NVD_URL.format(cve_id=cve_id), timeout=timeout,
                         follow_redirects=True)
        if resp.status_code != 200:
            raise FetchFailed(f"HTTP {resp.status_code} for {cve_id}")
        return resp.content
    return fetch


def scrape_nvd(cve_id: str, fetcher: Fetcher, store: SnapshotStore | None = None,
               retries: int = 3, backoff: float = 0.5) -> NvdPageSnapshot:
    """Fetch one detail page and parse the weakness-enumeration labels.

    Fetch failures retry with exponential backoff and finally raise; parse
    failures still persist the snapshot, with empty labels and flagged=True.
    Labels outside the Top 25 are retained verbatim.
    """
    last: Exception | None = None
    body: bytes | None = None
    for attempt in range(retries):
        if attempt:
            time.sleep(backoff * (2 ** (attempt - 1)))
        try:
            body = fetcher(cve_id)
            break
        except Exception as exc:
            last = exc
    if body is None:
        raise FetchFailed(f"fetch of {cve_id} failed after {retries} attempts: {last}")
    labels = parse_nvd_labels(body)
    snap = NvdPageSnapshot(
        cve_id=cve_id, fetched_at=time.time(), body=body,
        parsed_labels=labels if labels is not None else frozenset(),
        flagged=labels is None)
    if store is not None:
        store.save(snap)
    return snap


def scrape_many(cve_ids: Sequence[str], fetcher: Fetcher, store: SnapshotStore,
                concurrency: int = 4, skip_existing: bool = True,
                **kwargs) -> dict[str, NvdPageSnapshot]:
    """Scrape many ids concurrently; the store serializes one write per id."""
    results: dict[str, NvdPageSnapshot] = {}
    todo = []
    for cve_id in cve_ids:
        if skip_existing and store.has(cve_id):
            results[cve_id] = store.load(cve_id)
        else:
            todo.append(cve_id)
    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        for cve_id, snap in zip(todo, pool.map(
                lambda cid: scrape_nvd(cid, fetcher, store, **kwargs), todo)):
            results[cve_id] = snap
    return results
