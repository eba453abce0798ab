"""HTTP surface: POST /embed and the scorer wire protocol POST /score_batch.

/score_batch scores each document by the highest cosine similarity between
any query sentence and any document sentence. The encoder is treated as
single-threaded and guarded by a lock.
"""

from __future__ import annotations

import re
import threading

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .encoder import EncoderError

# minimal splitter for wire-protocol texts, which arrive unsegmented
_SENT_BREAK = re.compile(r"(?<=[.!?])\s+(?=[A-Z0-9\"'(])")


def split_sentences(text: str) -> list[str]:
    parts = [p.strip() for p in _SENT_BREAK.split(text.strip())]
    return [p for p in parts if p] or ([text.strip()] if text.strip() else [])


class EmbedRequest(BaseModel):
    texts: list[str]
    normalize: bool = True


class ScoreDocument(BaseModel):
    id: str
    text: str


class ScoreBatchRequest(BaseModel):
    query: str
    documents: list[ScoreDocument]


def create_app(encoder) -> FastAPI:
    app = FastAPI(title="embedsvc")
    lock = threading.Lock()

    def encode(texts, normalize=True):
        with lock:
            return encoder.encode(texts, normalize=normalize)

    @app.get("/healthz")
    def healthz():
        return {"model": encoder.name, "dim": encoder.dim}

    @app.post("/embed")
    def embed(req: EmbedRequest):
        try:
            vectors = encode(req.texts, req.normalize)
        except EncoderError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"dim": encoder.dim, "vectors": [[float(x) for x in v] for v in vectors]}

    @app.post("/score_batch")
    def score_batch(req: ScoreBatchRequest):
        if not req.query.strip():
            raise HTTPException(status_code=400, detail="empty query")
        if not req.documents:
            raise HTTPException(status_code=400, detail="no documents")
        query_sentences = split_sentences(req.query)
        doc_sentences = [split_sentences(d.text) for d in req.documents]
        if any(not s for s in doc_sentences):
            raise HTTPException(status_code=400, detail="document with no text")
        flat = query_sentences + [s for doc in doc_sentences for s in doc]
        try:
            vectors = encode(flat, normalize=True)
        except EncoderError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        q = vectors[: len(query_sentences)]
        scores = []
        offset = len(query_sentences)
        for doc, sentences in zip(req.documents, doc_sentences):
            d = vectors[offset: offset + len(sentences)]
            offset += len(sentences)
            scores.append({"id": doc.id, "score": float((q @ d.T).max())})
        return {"scores": scores}

    return app
