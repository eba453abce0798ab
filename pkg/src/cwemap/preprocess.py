"""Noise reduction and sentence segmentation shared by all rankers.

Cleanup removes product/vendor names (gazetteer lookup) and granular
software details (URLs, emails, domains, CVE ids, version strings, file
paths) that carry no signal at the weakness level. Everything here is
rule-based and deterministic so ranking runs reproduce bit-for-bit.

Order of operations for rankers: cleanup first, then sentence segmentation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

Span = tuple[int, int]

# category name -> compiled pattern, in priority order (ties at the same
# start position and length resolve in this order)
_PATTERNS: list[tuple[str, re.Pattern]] = [
    ("cve_id", re.compile(r"(?<![A-Za-z0-9])CVE-\d{4}-\d{4,}(?![A-Za-z0-9])")),
    ("url", re.compile(r"(?<![A-Za-z0-9])(?:https?://|www\.)[^\s<>\"']+", re.IGNORECASE)),
    ("email", re.compile(
        r"(?<![A-Za-z0-9._%+-])[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}(?![A-Za-z0-9])")),
    ("domain", re.compile(
        r"(?<![A-Za-z0-9.@-])(?:[A-Za-z][A-Za-z0-9-]*\.)+"
        r"(?:com|org|net|io|gov|edu|mil|info|biz|dev|app|cloud|co|us|uk|de|cn|ru|jp|fr|it|nl|au|br|in|eu)"
        r"(?![A-Za-z0-9.-])")),
    # 2.0.0, 1.4.x, 2020.05, optionally with a release suffix like 19.1R3-S9
    ("version", re.compile(
        r"(?<![A-Za-z0-9.])v?\d+(?:\.(?:\d+|[xX]))+"
        r"(?:[A-Za-z][A-Za-z0-9]*(?:-[A-Za-z0-9]+)*)?(?![A-Za-z0-9.])")),
    ("filepath", re.compile(
        r"(?<![A-Za-z0-9])(?:/[A-Za-z0-9._~-]+){2,}/?(?![A-Za-z0-9])"
        r"|(?<![A-Za-z0-9])[A-Za-z]:\\[^\s\"']+")),
]

_WORD = re.compile(r"[a-z0-9]+")
_WS = re.compile(r"\s+")


class Gazetteer:
    """Case-insensitive product/vendor phrase list, longest match first."""

    def __init__(self, phrases: Iterable[str]):
        cleaned = []
        seen = set()
        for p in phrases:
            p = _WS.sub(" ", p.strip())
            if not p:
                raise ValueError("empty gazetteer phrase")
            if p.lower() not in seen:
                seen.add(p.lower())
                cleaned.append(p)
        # longest first so the alternation prefers the longest match
        cleaned.sort(key=len, reverse=True)
        self.phrases: tuple[str, ...] = tuple(cleaned)
        if cleaned:
            alt = "|".join(re.escape(p).replace(r"\ ", r"\s+") for p in cleaned)
            self._re = re.compile(rf"(?<![A-Za-z0-9])(?:{alt})(?![A-Za-z0-9])", re.IGNORECASE)
        else:
            self._re = None

    def finditer(self, text: str):
        if self._re is None:
            return iter(())
        return self._re.finditer(text)

    def __len__(self):
        return len(self.phrases)

    def __contains__(self, phrase: str) -> bool:
        return _WS.sub(" ", phrase.strip()).lower() in {p.lower() for p in self.phrases}


def load_gazetteer(path: str | Path | None = None) -> Gazetteer:
    """Load a gazetteer file (one phrase per line, '#' comments)."""
    if path is None:
        text = resources.files("cwemap.data").joinpath("gazetteer.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    phrases = [ln.strip() for ln in text.splitlines()
               if ln.strip() and not ln.lstrip().startswith("#")]
    return Gazetteer(phrases)


@lru_cache(maxsize=8)
def _stopwords_from(path: str | None) -> frozenset[str]:
    if path is None:
        text = resources.files("cwemap.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines()
                     if w.strip() and not w.lstrip().startswith("#"))


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    return _stopwords_from(str(path) if path is not None else None)


@dataclass(frozen=True)
class CleanupReport:
    input: str
    output: str
    # (span in the original text, category); categories are disjoint per span
    removed: tuple[tuple[Span, str], ...]


def _select_matches(text: str, gazetteer: Gazetteer | None) -> list[tuple[int, int, str]]:
    """All pattern matches in `text`, overlaps resolved greedily."""
    candidates: list[tuple[int, int, int, str]] = []
    if gazetteer is not None:
        for m in gazetteer.finditer(text):
            candidates.append((m.start(), m.end(), 0, "gazetteer"))
    for prio, (cat, pat) in enumerate(_PATTERNS, start=1):
        for m in pat.finditer(text):
            start, end = m.start(), m.end()
            if cat == "url":
                while end > start and text[end - 1] in ".,;:)]}\"'":
                    end -= 1
            if end > start:
                candidates.append((start, end, prio, cat))
    candidates.sort(key=lambda c: (c[0], -(c[1] - c[0]), c[2]))
    chosen: list[tuple[int, int, str]] = []
    last_end = -1
    for start, end, _prio, cat in candidates:
        if start >= last_end:
            chosen.append((start, end, cat))
            last_end = end
    return chosen


def _normalize_ws(s: str) -> str:
    return _WS.sub(" ", s).strip()


def cleanup(text: str, gazetteer: Gazetteer | None = None) -> CleanupReport:
    """Remove gazetteer phrases and pattern matches from `text`.

    Matching repeats until a fixed point, so phrases that only become
    contiguous after an inner deletion (e.g. a version between two words of
    a product name) are still caught; the operation is idempotent. Removed
    spans always refer to positions in the original input.
    """
    keep = [True] * len(text)
    removed: list[tuple[Span, str]] = []

    for _round in range(10):
        # working copy of surviving chars, whitespace runs collapsed to one
        # space that keeps the original index of the run's first char
        work_chars: list[str] = []
        work_orig: list[int] = []
        pending_space = -1
        for i, ch in enumerate(text):
            if not keep[i]:
                continue
            if ch.isspace():
                if work_chars and pending_space < 0:
                    pending_space = i
                continue
            if pending_space >= 0:
                work_chars.append(" ")
                work_orig.append(pending_space)
                pending_space = -1
            work_chars.append(ch)
            work_orig.append(i)
        work = "".join(work_chars)

        matches = _select_matches(work, gazetteer)
        if not matches:
            break
        for start, end, cat in matches:
            origs = [work_orig[j] for j in range(start, end)]
            for oi in origs:
                keep[oi] = False
            # contiguous runs in original coordinates become report spans
            run_start = origs[0]
            prev = origs[0]
            for oi in origs[1:]:
                if oi != prev + 1:
                    removed.append(((run_start, prev + 1), cat))
                    run_start = oi
                prev = oi
            removed.append(((run_start, prev + 1), cat))

    output = _normalize_ws("".join(ch for i, ch in enumerate(text) if keep[i]))
    removed.sort(key=lambda r: r[0])
    return CleanupReport(input=text, output=output, removed=tuple(removed))


def tokenize(text: str, stopwords: frozenset[str] | None = None) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop stopwords."""
    if stopwords is None:
        stopwords = load_stopwords()
    return [t for t in _WORD.findall(text.lower()) if t not in stopwords]


# Abbreviations that end with '.' but do not terminate a sentence.
_NONFINAL_SUFFIXES = tuple(
    s + "." for s in (
        "e.g", "i.e", " etc", " vs", " inc", " ltd", " corp", " approx",
        " cf", " al", " fig", " ver", " rev", " dr", " mr", " mrs", " ms",
        " jr", " sr", " st",
    )
)
_SENT_BREAK = re.compile(r"([.!?]+)(\s+)")


def segment_sentences(text: str) -> list[str]:
    """Split on sentence-final punctuation followed by whitespace and a
    capital (or digit/opening quote). Dots inside version strings or ids are
    never followed by whitespace, so they cannot split."""
    text = text.strip()
    if not text:
        return []
    sentences = []
    start = 0
    for m in _SENT_BREAK.finditer(text):
        nxt = m.end()
        if nxt >= len(text):
            break
        c = text[nxt]
        if not (c.isupper() or c.isdigit() or c in "\"'("):
            continue
        if text[: m.end(1)].lower().endswith(_NONFINAL_SUFFIXES):
            continue
        piece = text[start : m.end(1)].strip()
        if piece:
            sentences.append(piece)
        start = nxt
    rest = text[start:].strip()
    if rest:
        sentences.append(rest)
    return sentences
