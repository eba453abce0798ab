"""cwemap: map CVE records to the MITRE 2022 CWE Top 25 as a ranking task."""

from .corpus import (
    Catalog,
    CveRecord,
    CweEntry,
    DatasetRow,
    LabelAssignment,
    dataset_stats,
    format_label,
    load_catalog,
    load_dataset,
    parse_label,
    save_dataset,
)
from .rank import Bm25Params, Bm25Ranker, EmbeddingStore, RankedList

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "CveRecord",
    "CweEntry",
    "DatasetRow",
    "LabelAssignment",
    "Bm25Params",
    "Bm25Ranker",
    "EmbeddingStore",
    "RankedList",
    "dataset_stats",
    "format_label",
    "load_catalog",
    "load_dataset",
    "parse_label",
    "save_dataset",
    "__version__",
]
