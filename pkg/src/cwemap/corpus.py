"""Canonical domain types: the Top-25 catalog, the label grammar, dataset IO.

The label grammar is the one annotators type: a rank number 1..25, or a
causal chain of rank numbers joined by '-' (each weakness leads to the
next), e.g. "4" or "2-25".
"""

from __future__ import annotations

import csv
import io
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CatalogError, DatasetError, LabelError

CVE_ID_RE = re.compile(r"^CVE-(\d{4})-(\d{4,})$")

# Official 2022 Top 25 rank -> CWE id (most dangerous first, by CVSS score).
OFFICIAL_2022_RANKS = {
    1: "CWE-787", 2: "CWE-79", 3: "CWE-89", 4: "CWE-20", 5: "CWE-125",
    6: "CWE-78", 7: "CWE-416", 8: "CWE-22", 9: "CWE-352", 10: "CWE-434",
    11: "CWE-476", 12: "CWE-502", 13: "CWE-190", 14: "CWE-287", 15: "CWE-798",
    16: "CWE-862", 17: "CWE-77", 18: "CWE-306", 19: "CWE-119", 20: "CWE-276",
    21: "CWE-918", 22: "CWE-362", 23: "CWE-400", 24: "CWE-611", 25: "CWE-94",
}


class RecordState(str, Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    RESERVED = "reserved"
    OTHER = "other"


@dataclass(frozen=True)
class CweEntry:
    rank: int
    cwe_id: str
    name: str
    description: str
    extended_description: str
    cvss_score: float


@dataclass(frozen=True)
class CveRecord:
    cve_id: str
    title: str
    description: str
    state: RecordState = RecordState.ACCEPTED
    nvd_labels: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not CVE_ID_RE.match(self.cve_id):
            raise DatasetError(f"bad CVE id: {self.cve_id!r}")

    @property
    def year(self) -> int:
        return int(self.cve_id.split("-")[1])

    @property
    def text(self) -> str:
        """Ranking input: description plus title (the id is only an index)."""
        if self.title:
            return f"{self.description} {self.title}".strip()
        return self.description


@dataclass(frozen=True)
class LabelAssignment:
    """A single label or an ordered causal chain of rank numbers.

    chain == (4,) means rank 4 alone; chain == (2, 25) means rank 2 leads
    to rank 25. Immediate repetition (a-a) is rejected.
    """

    chain: tuple[int, ...]

    def __post_init__(self):
        if not self.chain:
            raise LabelError("empty label chain")
        for r in self.chain:
            if not isinstance(r, int) or not 1 <= r <= 25:
                raise LabelError(f"rank out of range 1..25: {r!r}")
        for a, b in zip(self.chain, self.chain[1:]):
            if a == b:
                raise LabelError(f"immediate repetition in chain: {a}-{b}")

    @property
    def is_single(self) -> bool:
        return len(self.chain) == 1

    def cwe_ids(self, catalog: Catalog) -> tuple[str, ...]:
        return tuple(catalog.by_rank(r).cwe_id for r in self.chain)


def parse_label(s: str) -> LabelAssignment:
    """Parse a grammar string like "4" or "2-25" into an assignment."""
    if not s or not s.strip():
        raise LabelError("empty label string")
    ranks = []
    for tok in s.strip().split("-"):
        if not tok.isdigit():
            raise LabelError(f"non-numeric token {tok!r} in {s!r}")
        ranks.append(int(tok))
    return LabelAssignment(tuple(ranks))


def format_label(a: LabelAssignment) -> str:
    return "-".join(str(r) for r in a.chain)


@dataclass(frozen=True)
class DatasetRow:
    cve_id: str
    assignment: LabelAssignment


@dataclass(frozen=True)
class CollatedCweText:
    """A CWE document for ranking: name + description + extended description."""

    cwe_id: str
    text: str
    sentences: tuple[str, ...]


class Catalog:
    """The 25-entry weakness catalog, ordered by rank."""

    def __init__(self, entries: Sequence[CweEntry]):
        entries = sorted(entries, key=lambda e: e.rank)
        if len(entries) != 25:
            raise CatalogError(f"catalog must have exactly 25 entries, got {len(entries)}")
        if sorted(e.rank for e in entries) != list(range(1, 26)):
            raise CatalogError("catalog ranks must be exactly 1..25")
        if len({e.cwe_id for e in entries}) != 25:
            raise CatalogError("catalog CWE ids must be distinct")
        for e in entries:
            if e.cvss_score < 0:
                raise CatalogError(f"negative cvss_score for {e.cwe_id}")
            if not e.name or not e.description:
                raise CatalogError(f"{e.cwe_id} missing name or description")
        self.entries: tuple[CweEntry, ...] = tuple(entries)
        self._by_rank = {e.rank: e for e in entries}
        self._by_id = {e.cwe_id: e for e in entries}

    def by_rank(self, rank: int) -> CweEntry:
        try:
            return self._by_rank[rank]
        except KeyError:
            raise CatalogError(f"no entry with rank {rank}") from None

    def by_id(self, cwe_id: str) -> CweEntry:
        try:
            return self._by_id[cwe_id]
        except KeyError:
            raise CatalogError(f"no entry with id {cwe_id}") from None

    def __contains__(self, cwe_id: str) -> bool:
        return cwe_id in self._by_id

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return 25

    def rank_of(self, cwe_id: str) -> int:
        return self.by_id(cwe_id).rank

    def collate(self, rank: int) -> CollatedCweText:
        """Build the ranking document for one entry.

        Sentence segmentation is the shared rule-based splitter, so every
        ranker sees the same sentence boundaries.
        """
        from .preprocess import segment_sentences

        e = self.by_rank(rank)
        parts = [e.name.rstrip(". ") + "."]
        parts.append(e.description.strip())
        if e.extended_description.strip():
            parts.append(e.extended_description.strip())
        text = " ".join(parts)
        return CollatedCweText(e.cwe_id, text, tuple(segment_sentences(text)))

    def collate_all(self) -> list[CollatedCweText]:
        return [self.collate(r) for r in range(1, 26)]


def load_catalog(path: str | Path | None = None) -> Catalog:
    """Load a catalog JSON file; defaults to the bundled 2022 file."""
    if path is None:
        data = json.loads(
            resources.files("cwemap.data").joinpath("cwe_catalog_2022.json").read_text("utf-8")
        )
    else:
        data = json.loads(Path(path).read_text("utf-8"))
    if not isinstance(data, list):
        raise CatalogError("catalog file must be a JSON array")
    entries = []
    for obj in data:
        try:
            entries.append(
                CweEntry(
                    rank=int(obj["rank"]),
                    cwe_id=str(obj["cwe_id"]),
                    name=str(obj["name"]),
                    description=str(obj["description"]),
                    extended_description=str(obj.get("extended_description", "")),
                    cvss_score=float(obj["cvss_score"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CatalogError(f"bad catalog entry: {exc}") from exc
    return Catalog(entries)


# ---------------------------------------------------------------------------
# Dataset files. Canonical format is two-column CSV with header
# `cve_id,labels`; a JSONL mirror exists for tooling and is the only format
# allowed to carry multiple rows per cve_id (multiple unrelated labels).
# ---------------------------------------------------------------------------

DATASET_HEADER = ["cve_id", "labels"]


def _check_cve_id(cve_id: str, where: str) -> str:
    if not CVE_ID_RE.match(cve_id):
        raise DatasetError(f"bad CVE id {cve_id!r} in {where}")
    return cve_id


def load_dataset(path: str | Path) -> list[DatasetRow]:
    """Load the canonical CSV. Duplicate cve_ids and bad labels are errors."""
    path = Path(path)
    rows: list[DatasetRow] = []
    seen: set[str] = set()
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != DATASET_HEADER:
            raise DatasetError(f"expected header {DATASET_HEADER}, got {header}")
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 2:
                raise DatasetError(f"{path}:{lineno}: expected 2 columns, got {len(rec)}")
            cve_id = _check_cve_id(rec[0].strip(), f"{path}:{lineno}")
            if cve_id in seen:
                raise DatasetError(f"{path}:{lineno}: duplicate cve_id {cve_id}")
            seen.add(cve_id)
            try:
                assignment = parse_label(rec[1].strip())
            except LabelError as exc:
                raise DatasetError(f"{path}:{lineno}: {exc}") from exc
            rows.append(DatasetRow(cve_id, assignment))
    return rows


def dump_dataset_csv(rows: Iterable[DatasetRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(DATASET_HEADER)
    seen: set[str] = set()
    for row in rows:
        if row.cve_id in seen:
            raise DatasetError(f"duplicate cve_id {row.cve_id} on save")
        seen.add(row.cve_id)
        writer.writerow([row.cve_id, format_label(row.assignment)])
    return out.getvalue()


def dump_dataset_jsonl(rows: Iterable[DatasetRow]) -> str:
    return "".join(
        json.dumps({"cve_id": r.cve_id, "labels": format_label(r.assignment)}) + "\n"
        for r in rows
    )


def save_dataset(rows: Iterable[DatasetRow], path: str | Path) -> None:
    Path(path).write_text(dump_dataset_csv(rows), encoding="utf-8", newline="")


def load_dataset_jsonl(path: str | Path) -> list[DatasetRow]:
    """JSONL mirror: one {"cve_id", "labels"} object per line.

    Unlike the CSV, repeated cve_ids are allowed here and represent multiple
    unrelated labels for the same record.
    """
    rows = []
    with Path(path).open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            cve_id = _check_cve_id(obj["cve_id"], f"{path}:{lineno}")
            rows.append(DatasetRow(cve_id, parse_label(obj["labels"])))
    return rows


def save_dataset_jsonl(rows: Iterable[DatasetRow], path: str | Path) -> None:
    Path(path).write_text(dump_dataset_jsonl(rows), encoding="utf-8")


@dataclass(frozen=True)
class DatasetStats:
    total: int
    single_count: int
    causal_count: int
    # rank -> count, over single-label rows only
    per_label_counts: dict[int, int]


def dataset_stats(rows: Sequence[DatasetRow]) -> DatasetStats:
    counts: Counter[int] = Counter()
    single = 0
    for row in rows:
        if row.assignment.is_single:
            single += 1
            counts[row.assignment.chain[0]] += 1
    per_label = {rank: counts.get(rank, 0) for rank in range(1, 26)}
    return DatasetStats(
        total=len(rows),
        single_count=single,
        causal_count=len(rows) - single,
        per_label_counts=per_label,
    )
