"""Sentence encoders behind one interface.

Two backends: `hash:<dim>` is a deterministic feature-hashing encoder that
needs no model files (the default, and what CI runs); `st:<name-or-path>`
loads a sentence-transformers checkpoint when one is available.
"""

from __future__ import annotations

import hashlib
import re
from typing import Sequence

import numpy as np

DEFAULT_SPEC = "hash:256"
MAX_SEQ_TOKENS = 384

_TOKEN = re.compile(r"[a-z0-9]+")


class EncoderError(Exception):
    pass


class HashingEncoder:
    """Feature-hashing bag-of-words encoder; deterministic across runs.

    Unigrams and adjacent bigrams hash (blake2b) into buckets with unit
    weight; unsigned accumulation keeps shared-token evidence positive so
    cosine similarity tracks token overlap. Inputs truncate at the max
    sequence length.
    """

    def __init__(self, dim: int = 256, max_seq: int = MAX_SEQ_TOKENS):
        if dim <= 0:
            raise EncoderError(f"dim must be positive, got {dim}")
        self.dim = dim
        self.max_seq = max_seq

    @property
    def name(self) -> str:
        return f"hash:{self.dim}"

    def _bucket(self, feature: str) -> int:
        digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "big") % self.dim

    def encode(self, texts: Sequence[str], normalize: bool = True) -> np.ndarray:
        if not texts:
            raise EncoderError("texts must be a non-empty list")
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for row, text in enumerate(texts):
            if not isinstance(text, str) or not text.strip():
                raise EncoderError(f"text {row} is empty")
            tokens = _TOKEN.findall(text.lower())[: self.max_seq]
            features = list(tokens)
            features += [f"{a}_{b}" for a, b in zip(tokens, tokens[1:])]
            for feat in features:
                out[row, self._bucket(feat)] += 1.0
            if normalize:
                norm = np.linalg.norm(out[row])
                if norm > 0:
                    out[row] /= norm
        return out


class SentenceTransformerEncoder:
    """Wraps a sentence-transformers checkpoint (name or local path)."""

    def __init__(self, model_name: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise EncoderError(f"sentence-transformers not installed: {exc}") from exc
        try:
            self._model = SentenceTransformer(model_name)
        except Exception as exc:
            raise EncoderError(f"cannot load checkpoint {model_name!r}: {exc}") from exc
        self.name = f"st:{model_name}"
        self.dim = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: Sequence[str], normalize: bool = True) -> np.ndarray:
        if not texts:
            raise EncoderError("texts must be a non-empty list")
        for row, text in enumerate(texts):
            if not isinstance(text, str) or not text.strip():
                raise EncoderError(f"text {row} is empty")
        vecs = self._model.encode(list(texts), normalize_embeddings=normalize,
                                  convert_to_numpy=True)
        return np.asarray(vecs, dtype=np.float64)


def get_encoder(spec: str = DEFAULT_SPEC):
    """Build an encoder from a spec string: "hash:<dim>" or "st:<model>"."""
    kind, _, arg = spec.partition(":")
    if kind == "hash":
        return HashingEncoder(dim=int(arg) if arg else 256)
    if kind == "st":
        if not arg:
            raise EncoderError("st: spec needs a model name or path")
        return SentenceTransformerEncoder(arg)
    raise EncoderError(f"unknown encoder spec {spec!r}")
