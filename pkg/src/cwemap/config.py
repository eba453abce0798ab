"""Run configuration: TOML file plus CLI flag overrides (flags win)."""

from __future__ import annotations

import sys
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import DataError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class RunConfig:
    # paths
    feed_dir: str | None = None
    records: str | None = None
    dataset: str | None = None
    catalog: str | None = None          # None = bundled 2022 catalog
    gazetteer: str | None = None        # None = bundled default
    stopwords: str | None = None        # None = bundled default
    snapshot_store: str | None = None
    embedding_store: str | None = None
    # ranking
    ranker: str = "bm25"                # bm25 | cosine | external
    k1: float = 1.2
    b: float = 0.75
    aggregation: str = "max"            # max | mean over sentence pairs
    scorer_endpoint: str | None = None
    preprocess: bool = True
    # evaluation
    seed: int = 13
    ks: tuple[int, ...] = (1, 2, 3, 5)
    train_fraction: float = 0.8
    # service
    host: str = "127.0.0.1"
    port: int = 8000
    annotators: tuple[str, str, str] = ("ann1", "ann2", "ann3")
    static_dir: str | None = None
    journal: str | None = None
    feedback_log: str | None = None
    # execution
    jobs: int = 4

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) in (None, "")]
        if missing:
            raise DataError(f"missing required config value(s): {', '.join(missing)}")


def load_config(path: str | Path | None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    try:
        data = tomllib.loads(Path(path).read_text("utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    known = {f.name for f in fields(RunConfig)}
    for key, value in data.items():
        if key not in known:
            raise DataError(f"unknown config key {key!r}")
        if key in ("ks", "annotators"):
            value = tuple(value)
        setattr(cfg, key, value)
    if len(cfg.annotators) != 3:
        raise DataError("annotators must list exactly 3 ids")
    return cfg
