"""Rankers: produce a 25-entry RankedList for a CVE record.

Three routes share the RankedList contract: Okapi BM25 over the collated
CWE documents, max/mean cosine over sentence embeddings, and an external
neural scorer reached over HTTP. Ties always break toward the lower
(more dangerous) catalog rank, so output is fully deterministic.
"""

from __future__ import annotations

import json
import math
import threading
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import httpx
import numpy as np

from . import _kernels
from .corpus import Catalog, CveRecord
from .errors import DataError, EmbeddingStoreError, ScorerProtocolError
from .preprocess import Gazetteer, cleanup, segment_sentences, tokenize


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self):
        if self.k1 <= 0:
            raise ValueError(f"k1 must be > 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass(frozen=True)
class RankedList:
    """All 25 catalog ranks with scores, best first.

    `flagged` marks degenerate inputs (empty query after cleanup) where the
    order is just the catalog fallback.
    """

    cve_id: str
    entries: tuple[tuple[int, float], ...]
    flagged: bool = False

    def __post_init__(self):
        if len(self.entries) != 25:
            raise DataError(f"RankedList needs 25 entries, got {len(self.entries)}")
        ranks = [r for r, _ in self.entries]
        if sorted(ranks) != list(range(1, 26)):
            raise DataError("RankedList must contain each rank 1..25 exactly once")
        for i, (rank, score) in enumerate(self.entries):
            if not math.isfinite(score):
                raise DataError(f"non-finite score for rank {rank}")
            if i:
                prev_rank, prev_score = self.entries[i - 1]
                if score > prev_score or (score == prev_score and rank < prev_rank):
                    raise DataError("RankedList entries out of order")

    @classmethod
    def from_scores(cls, cve_id: str, scores: Sequence[float], flagged: bool = False) -> RankedList:
        """Build from 25 scores indexed by catalog rank - 1."""
        if len(scores) != 25:
            raise DataError(f"expected 25 scores, got {len(scores)}")
        order = sorted(range(1, 26), key=lambda r: (-float(scores[r - 1]), r))
        return cls(cve_id, tuple((r, float(scores[r - 1])) for r in order), flagged)

    def position_of(self, rank: int) -> int:
        """1-based position of a catalog rank in this ranking."""
        for pos, (r, _) in enumerate(self.entries, start=1):
            if r == rank:
                return pos
        raise DataError(f"rank {rank} not in ranked list")

    def top(self, k: int) -> tuple[tuple[int, float], ...]:
        return self.entries[:k]

    def to_json(self) -> str:
        return json.dumps(
            {"cve_id": self.cve_id, "flagged": self.flagged,
             "entries": [[r, s] for r, s in self.entries]},
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, s: str) -> RankedList:
        obj = json.loads(s)
        return cls(obj["cve_id"], tuple((int(r), float(v)) for r, v in obj["entries"]),
                   bool(obj.get("flagged", False)))


def _query_tokens(cve: CveRecord, gazetteer: Gazetteer | None,
                  stopwords: frozenset[str] | None, preprocessed: bool) -> list[str]:
    text = cve.text
    if preprocessed:
        text = cleanup(text, gazetteer).output
    return tokenize(text, stopwords)


class Bm25Ranker:
    """Okapi BM25 with the 25 collated CWE texts as the document corpus.

    Document statistics (df, lengths, avgdl) are computed over exactly those
    25 documents. idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), N = 25.
    """

    N_DOCS = 25

    def __init__(self, catalog: Catalog, params: Bm25Params | None = None,
                 gazetteer: Gazetteer | None = None,
                 stopwords: frozenset[str] | None = None,
                 preprocess: bool = True):
        self.catalog = catalog
        self.params = params or Bm25Params()
        self.gazetteer = gazetteer
        self.stopwords = stopwords
        self.preprocess = preprocess

        docs = [tokenize(c.text, stopwords) for c in catalog.collate_all()]
        self._doc_freqs = [Counter(d) for d in docs]
        lengths = np.array([len(d) for d in docs], dtype=np.float64)
        avgdl = float(lengths.mean()) if lengths.any() else 1.0
        p = self.params
        self._dlnorm = p.k1 * (1.0 - p.b + p.b * lengths / avgdl)

        vocab: dict[str, int] = {}
        for d in docs:
            for t in d:
                vocab.setdefault(t, len(vocab))
        self._vocab = vocab
        self._tf = np.zeros((self.N_DOCS, len(vocab)), dtype=np.float64)
        for i, freqs in enumerate(self._doc_freqs):
            for t, n in freqs.items():
                self._tf[i, vocab[t]] = n
        df = np.count_nonzero(self._tf, axis=0).astype(np.float64)
        self._idf = np.log(1.0 + (self.N_DOCS - df + 0.5) / (df + 0.5))

    def scores(self, query_tokens: Sequence[str]) -> np.ndarray:
        counts = Counter(t for t in query_tokens if t in self._vocab)
        if not counts:
            return np.zeros(self.N_DOCS, dtype=np.float64)
        ids = np.array([self._vocab[t] for t in counts], dtype=np.intp)
        qtf = np.array(list(counts.values()), dtype=np.float64)
        tf = np.ascontiguousarray(self._tf[:, ids])
        return np.asarray(
            _kernels.bm25_scores(tf, qtf, self._idf[ids], self._dlnorm, self.params.k1)
        )

    def rank(self, cve: CveRecord) -> RankedList:
        tokens = _query_tokens(cve, self.gazetteer, self.stopwords, self.preprocess)
        if not tokens:
            return RankedList.from_scores(cve.cve_id, [0.0] * 25, flagged=True)
        return RankedList.from_scores(cve.cve_id, self.scores(tokens).tolist())


def bm25_rank(cve: CveRecord, catalog: Catalog, params: Bm25Params | None = None,
              **kwargs) -> RankedList:
    return Bm25Ranker(catalog, params, **kwargs).rank(cve)


class EmbeddingStore:
    """Sentence vectors keyed by (doc_key, sentence_index).

    Keys are "cve:{cve_id}" or "cwe:{cwe_id}". All vectors share one
    dimension and must be finite.
    """

    def __init__(self, dim: int):
        if dim <= 0:
            raise EmbeddingStoreError(f"dim must be positive, got {dim}")
        self.dim = dim
        self._vectors: dict[tuple[str, int], np.ndarray] = {}

    def add(self, key: str, sent: int, vec: Sequence[float]) -> None:
        arr = np.asarray(vec, dtype=np.float64)
        if arr.shape != (self.dim,):
            raise EmbeddingStoreError(
                f"vector for ({key!r}, {sent}) has dim {arr.shape}, store dim is {self.dim}")
        if not np.all(np.isfinite(arr)):
            raise EmbeddingStoreError(f"non-finite component in vector ({key!r}, {sent})")
        self._vectors[(key, sent)] = arr

    def vector(self, key: str, sent: int) -> np.ndarray:
        try:
            return self._vectors[(key, sent)]
        except KeyError:
            raise EmbeddingStoreError(f"missing vector for ({key!r}, sentence {sent})") from None

    def matrix(self, key: str, count: int) -> np.ndarray:
        return np.stack([self.vector(key, i) for i in range(count)])

    def sentence_count(self, key: str) -> int:
        return sum(1 for k, _ in self._vectors if k == key)

    def __len__(self):
        return len(self._vectors)

    @classmethod
    def load(cls, path: str | Path) -> EmbeddingStore:
        store: EmbeddingStore | None = None
        with Path(path).open(encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                obj = json.loads(line)
                try:
                    key, sent, dim, vec = obj["key"], int(obj["sent"]), int(obj["dim"]), obj["vec"]
                except (KeyError, TypeError, ValueError) as exc:
                    raise EmbeddingStoreError(f"{path}:{lineno}: bad record: {exc}") from exc
                if store is None:
                    store = cls(dim)
                elif dim != store.dim:
                    raise EmbeddingStoreError(
                        f"{path}:{lineno}: dim {dim} != store dim {store.dim}")
                store.add(key, sent, vec)
        if store is None:
            raise EmbeddingStoreError(f"{path}: empty embedding store")
        return store

    def save(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as f:
            for (key, sent), vec in sorted(self._vectors.items()):
                f.write(json.dumps(
                    {"key": key, "sent": sent, "dim": self.dim, "vec": vec.tolist()},
                    separators=(",", ":")))
                f.write("\n")


def _unit_rows(m: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return m / norms


def cosine_sentence_rank(cve: CveRecord, catalog: Catalog, store: EmbeddingStore,
                         aggregation: str = "max",
                         gazetteer: Gazetteer | None = None) -> RankedList:
    """Rank by cosine similarity between CVE sentences and CWE sentences.

    Per CWE, the score is the max (default) or mean over all sentence pairs.
    The store must hold one vector per sentence of the cleaned CVE text and
    per sentence of each collated CWE text.
    """
    if aggregation not in ("max", "mean"):
        raise ValueError(f"aggregation must be 'max' or 'mean', got {aggregation!r}")
    agg = _kernels.max_cosine if aggregation == "max" else _kernels.mean_cosine

    cve_sentences = segment_sentences(cleanup(cve.text, gazetteer).output)
    if not cve_sentences:
        return RankedList.from_scores(cve.cve_id, [0.0] * 25, flagged=True)
    q = _unit_rows(store.matrix(f"cve:{cve.cve_id}", len(cve_sentences)))

    scores = []
    for collated in catalog.collate_all():
        d = _unit_rows(store.matrix(f"cwe:{collated.cwe_id}", len(collated.sentences)))
        scores.append(float(agg(q, d)))
    return RankedList.from_scores(cve.cve_id, scores)


def score_batch_request(cve: CveRecord, catalog: Catalog,
                        gazetteer: Gazetteer | None = None,
                        preprocess: bool = True) -> dict:
    """Body for POST /score_batch: the query text plus all 25 documents."""
    text = cve.text
    if preprocess:
        text = cleanup(text, gazetteer).output
    return {
        "query": text,
        "documents": [{"id": c.cwe_id, "text": c.text} for c in catalog.collate_all()],
    }


def external_rank(cve: CveRecord, catalog: Catalog, scorer_endpoint: str,
                  client: httpx.Client | None = None,
                  retries: int = 3, retry_delay: float = 0.2,
                  timeout: float = 30.0,
                  gazetteer: Gazetteer | None = None,
                  preprocess: bool = True) -> RankedList:
    """Fetch 25 relevance scores from an external scorer and sort them.

    Score normalization is the scorer's concern; this only assembles and
    sorts. Non-200 responses and transport errors are retried with backoff.
    """
    body = score_batch_request(cve, catalog, gazetteer, preprocess)
    url = scorer_endpoint.rstrip("/") + "/score_batch"
    own_client = client is None
    if own_client:
        client = httpx.Client(timeout=timeout)
    try:
        last_error: Exception | None = None
        for attempt in range(retries):
            if attempt:
                time.sleep(retry_delay * (2 ** (attempt - 1)))
            try:
                resp = client.post(url, json=body)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if resp.status_code != 200:
                last_error = ScorerProtocolError(
                    f"scorer returned HTTP {resp.status_code}")
                continue
            return _parse_score_response(cve.cve_id, resp.json(), catalog)
        raise ScorerProtocolError(
            f"scorer at {url} failed after {retries} attempts: {last_error}")
    finally:
        if own_client:
            client.close()


def _parse_score_response(cve_id: str, obj: dict, catalog: Catalog) -> RankedList:
    scores_list = obj.get("scores")
    if not isinstance(scores_list, list) or len(scores_list) != 25:
        n = len(scores_list) if isinstance(scores_list, list) else "no"
        raise ScorerProtocolError(f"expected 25 scores, got {n}")
    by_rank = [None] * 25
    for item in scores_list:
        try:
            rank = catalog.rank_of(str(item["id"]))
            score = float(item["score"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScorerProtocolError(f"bad score item {item!r}: {exc}") from exc
        if not math.isfinite(score):
            raise ScorerProtocolError(f"non-finite score for {item['id']}")
        if by_rank[rank - 1] is not None:
            raise ScorerProtocolError(f"duplicate score for {item['id']}")
        by_rank[rank - 1] = score
    return RankedList.from_scores(cve_id, by_rank)  # type: ignore[arg-type]


def external_rank_many(cves: Iterable[CveRecord], catalog: Catalog, scorer_endpoint: str,
                       fanout: int = 4, cancel: threading.Event | None = None,
                       **kwargs) -> dict[str, RankedList]:
    """Rank many records with bounded-parallel requests.

    Setting `cancel` aborts before each not-yet-started request.
    """
    results: dict[str, RankedList] = {}
    cves = list(cves)
    with httpx.Client(timeout=kwargs.pop("timeout", 30.0)) as client:
        def work(cve: CveRecord):
            if cancel is not None and cancel.is_set():
                return None
            return external_rank(cve, catalog, scorer_endpoint, client=client, **kwargs)

        with ThreadPoolExecutor(max_workers=max(1, fanout)) as pool:
            for cve, ranked in zip(cves, pool.map(work, cves)):
                if ranked is not None:
                    results[cve.cve_id] = ranked
    return results
