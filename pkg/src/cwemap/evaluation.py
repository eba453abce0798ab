"""Ranking metrics, stratified splits, training-pair export, macro-F1 scoring.

Single-relevant-document metrics: with the gold label at 1-based position p,

    RR     = 1/p
    AP@k   = 1/p if p <= k else 0        (truncated average precision)
    NDCG@k = 1/log2(p+1) if p <= k else 0 (binary gain, IDCG = 1)

Causal-chain rows are excluded from ranking evaluation; `relax_to_first`
maps them onto their first chain element for exploratory runs.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Catalog, DatasetRow, LabelAssignment
from .errors import DataError
from .rank import RankedList

logger = logging.getLogger(__name__)

DEFAULT_KS = (1, 2, 3, 5)


def reciprocal_rank(ranked: RankedList, truth: int) -> float:
    """Inverse of the position of the gold rank in the ranked list."""
    return 1.0 / ranked.position_of(truth)


def average_precision_at_k(ranked: RankedList, truth: int, k: int) -> float:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    pos = ranked.position_of(truth)
    return 1.0 / pos if pos <= k else 0.0


def ndcg_at_k(ranked: RankedList, truth: int, k: int) -> float:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    pos = ranked.position_of(truth)
    return 1.0 / math.log2(pos + 1) if pos <= k else 0.0


@dataclass(frozen=True)
class EvalReport:
    model: str
    mrr: float
    map_at: dict[int, float]
    ndcg_at: dict[int, float]
    n_queries: int

    def validate(self) -> None:
        """Check the arithmetic identities that hold for single-label data."""
        ks = sorted(self.map_at)
        if ks != sorted(self.ndcg_at):
            raise DataError("map_at and ndcg_at must share cutoffs")
        eps = 1e-9
        if 1 in self.map_at and abs(self.map_at[1] - self.ndcg_at[1]) > eps:
            raise DataError(f"MAP@1 {self.map_at[1]} != NDCG@1 {self.ndcg_at[1]}")
        for k in ks:
            if self.mrr + eps < self.map_at[k]:
                raise DataError(f"MRR {self.mrr} < MAP@{k} {self.map_at[k]}")
            if self.ndcg_at[k] + eps < self.map_at[k]:
                raise DataError(f"NDCG@{k} {self.ndcg_at[k]} < MAP@{k} {self.map_at[k]}")
        for a, b in zip(ks, ks[1:]):
            if self.map_at[b] + eps < self.map_at[a]:
                raise DataError(f"MAP@k decreasing from k={a} to k={b}")
            if self.ndcg_at[b] + eps < self.ndcg_at[a]:
                raise DataError(f"NDCG@k decreasing from k={a} to k={b}")

    def to_json(self) -> str:
        return json.dumps(
            {
                "model": self.model,
                "mrr": self.mrr,
                "map_at": {str(k): v for k, v in sorted(self.map_at.items())},
                "ndcg_at": {str(k): v for k, v in sorted(self.ndcg_at.items())},
                "n_queries": self.n_queries,
            },
            indent=2,
        )

    def to_table(self) -> str:
        """Aligned plain-text row set: MRR, then MAP@k and NDCG@k columns."""
        ks = sorted(self.map_at)
        header = ["Model", "MRR"] + [f"MAP@{k}" for k in ks] + [f"NDCG@{k}" for k in ks]
        row = [self.model or "-", f"{self.mrr:.4f}"]
        row += [f"{self.map_at[k]:.4f}" for k in ks]
        row += [f"{self.ndcg_at[k]:.4f}" for k in ks]
        widths = [max(len(h), len(v)) for h, v in zip(header, row)]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        return fmt.format(*header) + "\n" + fmt.format(*row)


def single_label_rows(rows: Iterable[DatasetRow]) -> list[DatasetRow]:
    return [r for r in rows if r.assignment.is_single]


def relax_to_first(rows: Iterable[DatasetRow]) -> list[DatasetRow]:
    """Map causal chains onto their first element (exploratory relaxation)."""
    return [
        r if r.assignment.is_single
        else DatasetRow(r.cve_id, LabelAssignment((r.assignment.chain[0],)))
        for r in rows
    ]


def evaluate(rankings: Mapping[str, RankedList], gold: Sequence[DatasetRow],
             ks: Sequence[int] = DEFAULT_KS, model: str = "") -> EvalReport:
    """Mean MRR/MAP@k/NDCG@k over the gold rows.

    Queries are accumulated in sorted cve_id order so the output is
    bit-stable regardless of input ordering.
    """
    if not gold:
        raise DataError("no gold rows to evaluate")
    ks = tuple(sorted(set(ks)))
    rr_sum = 0.0
    ap_sum = {k: 0.0 for k in ks}
    nd_sum = {k: 0.0 for k in ks}
    for row in sorted(gold, key=lambda r: r.cve_id):
        if not row.assignment.is_single:
            raise DataError(f"{row.cve_id}: causal row in ranking evaluation")
        if row.cve_id not in rankings:
            raise DataError(f"missing ranking for gold row {row.cve_id}")
        ranked = rankings[row.cve_id]
        truth = row.assignment.chain[0]
        rr_sum += reciprocal_rank(ranked, truth)
        for k in ks:
            ap_sum[k] += average_precision_at_k(ranked, truth, k)
            nd_sum[k] += ndcg_at_k(ranked, truth, k)
    n = len(gold)
    report = EvalReport(
        model=model,
        mrr=rr_sum / n,
        map_at={k: ap_sum[k] / n for k in ks},
        ndcg_at={k: nd_sum[k] / n for k in ks},
        n_queries=n,
    )
    report.validate()
    return report


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def stratified_split(rows: Sequence[DatasetRow], spec: SplitSpec) -> tuple[list[DatasetRow], list[DatasetRow]]:
    """Deterministic stratified split of single-label rows by label rank.

    Per label, train gets round(train_fraction * n) rows; classes with fewer
    than 2 rows go entirely to train (with a warning). Outputs are sorted by
    cve_id so equal inputs produce byte-identical partitions.
    """
    by_label: dict[int, list[DatasetRow]] = {}
    for r in rows:
        if not r.assignment.is_single:
            raise DataError(f"{r.cve_id}: causal row passed to stratified_split")
        by_label.setdefault(r.assignment.chain[0], []).append(r)

    rng = random.Random(spec.seed)
    train: list[DatasetRow] = []
    test: list[DatasetRow] = []
    for label in sorted(by_label):
        group = sorted(by_label[label], key=lambda r: r.cve_id)
        if len(group) < 2:
            logger.warning("label rank %d has %d row(s); placing in train", label, len(group))
            train.extend(group)
            continue
        rng.shuffle(group)
        n_train = int(spec.train_fraction * len(group) + 0.5)
        n_train = min(max(n_train, 1), len(group) - 1)
        train.extend(group[:n_train])
        test.extend(group[n_train:])
    train.sort(key=lambda r: r.cve_id)
    test.sort(key=lambda r: r.cve_id)
    return train, test


@dataclass(frozen=True)
class TrainingPair:
    cve_id: str
    cwe_id: str
    query_text: str
    doc_text: str
    relevance: int


def export_training_pairs(rows: Sequence[DatasetRow], catalog: Catalog,
                          query_texts: Mapping[str, str],
                          negatives_per_positive: int = 1, seed: int = 0) -> list[TrainingPair]:
    """One positive plus n seeded random negatives per single-label row.

    Negatives are drawn uniformly without replacement from the other 24
    ranks. query_texts maps cve_id to the cleaned CVE text; doc texts are
    the collated CWE texts.
    """
    if negatives_per_positive not in (1, 2):
        raise ValueError("negatives_per_positive must be 1 or 2")
    doc_text = {c.cwe_id: c.text for c in catalog.collate_all()}
    rng = random.Random(seed)
    pairs: list[TrainingPair] = []
    for row in rows:
        if not row.assignment.is_single:
            raise DataError(f"{row.cve_id}: causal row in training export")
        pos = row.assignment.chain[0]
        if row.cve_id not in query_texts:
            raise DataError(f"missing query text for {row.cve_id}")
        query = query_texts[row.cve_id]
        pos_id = catalog.by_rank(pos).cwe_id
        pairs.append(TrainingPair(row.cve_id, pos_id, query, doc_text[pos_id], 1))
        others = [r for r in range(1, 26) if r != pos]
        for neg in rng.sample(others, negatives_per_positive):
            neg_id = catalog.by_rank(neg).cwe_id
            pairs.append(TrainingPair(row.cve_id, neg_id, query, doc_text[neg_id], 0))
    return pairs


def save_training_pairs(pairs: Iterable[TrainingPair], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as f:
        for p in pairs:
            f.write(json.dumps(
                {"cve_id": p.cve_id, "cwe_id": p.cwe_id, "query": p.query_text,
                 "document": p.doc_text, "relevance": p.relevance},
                separators=(",", ":")))
            f.write("\n")


# ---------------------------------------------------------------------------
# Macro-F1 for generated weakness names.
# ---------------------------------------------------------------------------

def _normalize_name(s: str) -> str:
    return " ".join(s.split()).lower()


@dataclass(frozen=True)
class MacroF1Report:
    per_class: dict[str, float]
    macro_avg: float
    n_classes: int


def load_predictions(path: str | Path) -> dict[str, str]:
    """Predictions JSONL: one {"cve_id", "label"} object per line."""
    preds: dict[str, str] = {}
    with Path(path).open(encoding="utf-8") as f:
        for line in f:
            if line.strip():
                obj = json.loads(line)
                preds[obj["cve_id"]] = str(obj["label"])
    return preds


def macro_f1(predictions: Mapping[str, str], gold: Sequence[DatasetRow],
             catalog: Catalog) -> MacroF1Report:
    """Per-class and macro-averaged F1 of generated weakness names.

    Matching is case-insensitive exact match after whitespace normalization
    against catalog names. Generated strings that match no catalog name form
    their own classes and score F1 0 by construction.
    """
    canon = {_normalize_name(e.name): e.name for e in catalog}
    gold_class: dict[str, str] = {}
    for row in gold:
        if not row.assignment.is_single:
            raise DataError(f"{row.cve_id}: causal row in macro_f1 gold")
        gold_class[row.cve_id] = catalog.by_rank(row.assignment.chain[0]).name

    pred_class: dict[str, str | None] = {}
    for cve_id in gold_class:
        raw = predictions.get(cve_id)
        if raw is None:
            pred_class[cve_id] = None
            continue
        norm = _normalize_name(raw)
        pred_class[cve_id] = canon.get(norm, norm)

    classes = set(gold_class.values()) | {c for c in pred_class.values() if c is not None}
    per_class: dict[str, float] = {}
    for cls in classes:
        tp = sum(1 for cid in gold_class
                 if gold_class[cid] == cls and pred_class[cid] == cls)
        fp = sum(1 for cid in gold_class
                 if pred_class[cid] == cls and gold_class[cid] != cls)
        fn = sum(1 for cid in gold_class
                 if gold_class[cid] == cls and pred_class[cid] != cls)
        denom = 2 * tp + fp + fn
        per_class[cls] = 2 * tp / denom if denom else 0.0
    macro = sum(per_class.values()) / len(per_class) if per_class else 0.0
    return MacroF1Report(per_class=per_class, macro_avg=macro, n_classes=len(per_class))
