"""Embedding-store export in the ranking toolkit's JSONL format.

One object per vector: {"key", "sent", "dim", "vec"}; keys are
"cve:{cve_id}" or "cwe:{cwe_id}". Sentence segmentation happens upstream
(the primary component's `preprocess --sentences-out`); this side only
encodes what it is given.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable


class StoreError(Exception):
    pass


def load_sentence_file(path: str | Path) -> dict[str, list[str]]:
    """Sentences JSONL: one {"key", "sentences": [...]} object per line."""
    out: dict[str, list[str]] = {}
    with Path(path).open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            try:
                key, sentences = obj["key"], list(obj["sentences"])
            except (KeyError, TypeError) as exc:
                raise StoreError(f"{path}:{lineno}: bad record: {exc}") from exc
            if key in out:
                raise StoreError(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = sentences
    return out


def export_store(encoder, sentences_by_key: dict[str, list[str]],
                 out_path: str | Path, normalize: bool = True) -> int:
    """Encode every sentence and write the store; returns the line count.

    Output ordering is sorted by (key, sentence index), so re-running with
    the same encoder and inputs yields a byte-identical file.
    """
    lines = 0
    with Path(out_path).open("w", encoding="utf-8") as f:
        for key in sorted(sentences_by_key):
            sentences = sentences_by_key[key]
            if not sentences:
                continue
            vectors = encoder.encode(sentences, normalize=normalize)
            for sent, vec in enumerate(vectors):
                f.write(json.dumps(
                    {"key": key, "sent": sent, "dim": encoder.dim,
                     "vec": [float(x) for x in vec]},
                    separators=(",", ":")) + "\n")
                lines += 1
    return lines
