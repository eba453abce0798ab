"""Command-line interface: one subcommand per pipeline stage.

Exit codes: 0 ok, 1 usage, 2 data error, 3 upstream/service error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .annotate import Workflow
from .config import RunConfig, load_config
from .corpus import (
    dataset_stats,
    load_catalog,
    load_dataset,
    save_dataset,
)
from .errors import CwemapError, DataError, ServiceError
from .evaluation import (
    EvalReport,
    evaluate,
    export_training_pairs,
    load_predictions,
    macro_f1,
    relax_to_first,
    save_training_pairs,
    single_label_rows,
    stratified_split,
    SplitSpec,
)
from .ingest import (
    filter_accepted,
    load_records,
    narrow_candidates,
    parse_feed,
    save_candidates,
    save_records,
    scrape_many,
    url_fetcher,
    SnapshotStore,
)
from .preprocess import cleanup, load_gazetteer, load_stopwords, segment_sentences
from .rank import Bm25Params, Bm25Ranker, EmbeddingStore, RankedList, cosine_sentence_rank, external_rank

pass_config = click.make_pass_decorator(RunConfig)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="TOML config file; flags override its values.")
@click.option("--jobs", type=int, default=None, help="Global parallelism bound.")
@click.pass_context
def cli(ctx, config_path, jobs):
    cfg = load_config(config_path)
    if jobs is not None:
        cfg.jobs = jobs
    ctx.obj = cfg


def _catalog(cfg: RunConfig):
    return load_catalog(cfg.catalog)


def _bm25(cfg: RunConfig, catalog, preprocess: bool | None = None) -> Bm25Ranker:
    return Bm25Ranker(
        catalog,
        Bm25Params(k1=cfg.k1, b=cfg.b),
        gazetteer=load_gazetteer(cfg.gazetteer),
        stopwords=load_stopwords(cfg.stopwords),
        preprocess=cfg.preprocess if preprocess is None else preprocess,
    )


def _rank_one(cfg: RunConfig, catalog, record, preprocess: bool | None = None) -> RankedList:
    if cfg.ranker == "bm25":
        return _bm25(cfg, catalog, preprocess).rank(record)
    if cfg.ranker == "cosine":
        cfg.require("embedding_store")
        store = EmbeddingStore.load(cfg.embedding_store)
        return cosine_sentence_rank(record, catalog, store, cfg.aggregation,
                                    gazetteer=load_gazetteer(cfg.gazetteer))
    if cfg.ranker == "external":
        cfg.require("scorer_endpoint")
        return external_rank(record, catalog, cfg.scorer_endpoint,
                             gazetteer=load_gazetteer(cfg.gazetteer),
                             preprocess=cfg.preprocess)
    raise DataError(f"unknown ranker {cfg.ranker!r}")


def _rank_all(cfg: RunConfig, catalog, records, preprocess: bool | None = None):
    if cfg.ranker == "bm25":
        ranker = _bm25(cfg, catalog, preprocess)
        return {r.cve_id: ranker.rank(r) for r in records}
    if cfg.ranker == "cosine":
        cfg.require("embedding_store")
        store = EmbeddingStore.load(cfg.embedding_store)
        gaz = load_gazetteer(cfg.gazetteer)
        return {r.cve_id: cosine_sentence_rank(r, catalog, store, cfg.aggregation,
                                               gazetteer=gaz)
                for r in records}
    if cfg.ranker == "external":
        from .rank import external_rank_many

        cfg.require("scorer_endpoint")
        return external_rank_many(records, catalog, cfg.scorer_endpoint,
                                  fanout=cfg.jobs,
                                  gazetteer=load_gazetteer(cfg.gazetteer),
                                  preprocess=cfg.preprocess)
    raise DataError(f"unknown ranker {cfg.ranker!r}")


@cli.command()
@click.option("--feed-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--years", default=None,
              help="Comma-separated years to keep (default: all).")
@click.option("--all-states", is_flag=True,
              help="Keep rejected/reserved records instead of accepted only.")
@pass_config
def ingest(cfg, feed_dir, out, years, all_states):
    """Parse a cvelist-style feed directory into a records file."""
    year_set = [int(y) for y in years.split(",")] if years else None
    records = parse_feed(feed_dir, years=year_set)
    total = len(records)
    if not all_states:
        records = filter_accepted(records)
    save_records(records, out)
    click.echo(f"parsed {total} records, wrote {len(records)} to {out}")


@cli.command()
@click.option("--records", "records_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--top-n", type=int, default=None)
@click.option("--min-score", type=float, default=None)
@pass_config
def narrow(cfg, records_path, out, top_n, min_score):
    """Score records against the catalog with TF.IDF and keep the best."""
    catalog = _catalog(cfg)
    records = load_records(records_path)
    candidates = narrow_candidates(records, catalog, top_n=top_n,
                                   min_score=min_score,
                                   stopwords=load_stopwords(cfg.stopwords))
    save_candidates(candidates, out)
    click.echo(f"scored {len(records)} records, kept {len(candidates)} -> {out}")


def _ids_from_file(path: str) -> list[str]:
    p = Path(path)
    if p.suffix == ".jsonl":
        return [r.cve_id for r in load_records(p)]
    ids = []
    for line in p.read_text("utf-8").splitlines():
        first = line.split(",")[0].strip()
        if first.startswith("CVE-"):
            ids.append(first)
    return ids


@cli.command()
@click.option("--from", "ids_file", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Records .jsonl or any CSV whose first column is a CVE id.")
@click.option("--store", "store_dir", required=True, type=click.Path(file_okay=False))
@click.option("--offline", is_flag=True,
              help="Replay from existing snapshots instead of the network.")
@click.option("--rps", type=float, default=1.0, help="Live requests per second.")
@click.option("--update-records", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Records file to merge scraped labels into.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Destination for the merged records file.")
@pass_config
def scrape(cfg, ids_file, store_dir, offline, rps, update_records, out):
    """Fetch NVD detail pages and persist snapshots plus parsed CWE labels."""
    store = SnapshotStore(store_dir)
    fetcher = store.fetcher() if offline else url_fetcher(rps=rps)
    ids = _ids_from_file(ids_file)
    snaps = scrape_many(ids, fetcher, store, concurrency=cfg.jobs)
    flagged = sum(1 for s in snaps.values() if s.flagged)
    click.echo(f"scraped {len(snaps)} pages into {store_dir} ({flagged} flagged)")
    if update_records:
        if not out:
            raise DataError("--update-records needs --out")
        merged = []
        for rec in load_records(update_records):
            if rec.cve_id in snaps:
                rec = type(rec)(rec.cve_id, rec.title, rec.description, rec.state,
                                frozenset(snaps[rec.cve_id].parsed_labels))
            merged.append(rec)
        save_records(merged, out)
        click.echo(f"merged labels into {out}")


@cli.command()
@click.option("--records", "records_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Cleaned texts JSONL: one {cve_id, text} per record.")
@click.option("--sentences-out", type=click.Path(dir_okay=False), default=None,
              help="Segmented sentences JSONL for the embedding sidecar.")
@click.option("--include-cwe/--no-include-cwe", default=True,
              help="Also emit the 25 collated CWE sentence lists.")
@pass_config
def preprocess(cfg, records_path, out, sentences_out, include_cwe):
    """Clean record texts; optionally emit sentence files for embedding."""
    if not out and not sentences_out:
        raise DataError("nothing to do: pass --out and/or --sentences-out")
    gaz = load_gazetteer(cfg.gazetteer)
    records = load_records(records_path)
    cleaned = {r.cve_id: cleanup(r.text, gaz).output for r in records}
    if out:
        with open(out, "w", encoding="utf-8") as f:
            for cve_id, text in cleaned.items():
                f.write(json.dumps({"cve_id": cve_id, "text": text},
                                   separators=(",", ":")) + "\n")
        click.echo(f"wrote {len(cleaned)} cleaned records to {out}")
    if sentences_out:
        n = 0
        with open(sentences_out, "w", encoding="utf-8") as f:
            for cve_id, text in cleaned.items():
                f.write(json.dumps(
                    {"key": f"cve:{cve_id}", "sentences": segment_sentences(text)},
                    separators=(",", ":")) + "\n")
                n += 1
            if include_cwe:
                for collated in _catalog(cfg).collate_all():
                    f.write(json.dumps(
                        {"key": f"cwe:{collated.cwe_id}",
                         "sentences": list(collated.sentences)},
                        separators=(",", ":")) + "\n")
                    n += 1
        click.echo(f"wrote {n} sentence lists to {sentences_out}")


@cli.command()
@click.option("--records", "records_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--cve", "cve_id", default=None, help="Rank a single record.")
@click.option("--all", "rank_all", is_flag=True, help="Rank every record.")
@click.option("--ranker", type=click.Choice(["bm25", "cosine", "external"]),
              default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Rankings JSONL (required with --all).")
@pass_config
def rank(cfg, records_path, cve_id, rank_all, ranker, out):
    """Produce a 25-entry ranking for one record or for all of them."""
    if ranker:
        cfg.ranker = ranker
    catalog = _catalog(cfg)
    records = load_records(records_path)
    if cve_id:
        matches = [r for r in records if r.cve_id == cve_id]
        if not matches:
            raise DataError(f"{cve_id} not found in {records_path}")
        ranked = _rank_one(cfg, catalog, matches[0])
        if out:
            Path(out).write_text(ranked.to_json() + "\n", encoding="utf-8")
        flag = "  [flagged: catalog-order fallback]" if ranked.flagged else ""
        click.echo(f"{cve_id} ({cfg.ranker}){flag}")
        for pos, (r, score) in enumerate(ranked.entries, start=1):
            e = catalog.by_rank(r)
            click.echo(f"{pos:3d}. {e.cwe_id:<8} {score:10.4f}  {e.name}")
    elif rank_all:
        if not out:
            raise DataError("--all needs --out")
        rankings = _rank_all(cfg, catalog, records)
        with open(out, "w", encoding="utf-8") as f:
            for rid in sorted(rankings):
                f.write(rankings[rid].to_json() + "\n")
        click.echo(f"wrote {len(rankings)} rankings to {out}")
    else:
        raise DataError("pass --cve ID or --all")


@cli.command("eval")
@click.option("--records", "records_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--ranker", type=click.Choice(["bm25", "cosine", "external"]),
              default=None)
@click.option("--preproc/--no-preproc", "preproc", default=None,
              help="Toggle noise cleanup before ranking (bm25/external).")
@click.option("--ablate-preproc", is_flag=True,
              help="Run with and without cleanup and report the delta.")
@click.option("--relax-causal", is_flag=True,
              help="Score causal rows by their first chain element.")
@click.option("--json-out", type=click.Path(dir_okay=False), default=None)
@click.option("--plot-dir", type=click.Path(file_okay=False), default=None)
@pass_config
def eval_cmd(cfg, records_path, dataset_path, ranker, preproc, ablate_preproc,
             relax_causal, json_out, plot_dir):
    """Evaluate a ranker on an annotated dataset (MRR, MAP@k, NDCG@k)."""
    if ranker:
        cfg.ranker = ranker
    catalog = _catalog(cfg)
    records = {r.cve_id: r for r in load_records(records_path)}
    rows = load_dataset(dataset_path)
    gold = relax_to_first(rows) if relax_causal else single_label_rows(rows)
    missing = [r.cve_id for r in gold if r.cve_id not in records]
    if missing:
        raise DataError(f"{len(missing)} gold rows missing from records, "
                        f"first: {missing[0]}")
    targets = [records[r.cve_id] for r in gold]

    def run(preprocess_flag: bool | None, name: str) -> EvalReport:
        rankings = _rank_all(cfg, catalog, targets, preprocess=preprocess_flag)
        return evaluate(rankings, gold, ks=cfg.ks, model=name)

    if ablate_preproc:
        base = run(False, f"{cfg.ranker} -preproc")
        pre = run(True, f"{cfg.ranker} +preproc")
        click.echo(base.to_table())
        click.echo(pre.to_table())
        click.echo(f"MRR delta (+preproc - -preproc): {pre.mrr - base.mrr:+.4f}")
        reports = [base, pre]
    else:
        flag = cfg.preprocess if preproc is None else preproc
        sign = "+" if flag else "-"
        reports = [run(flag, f"{cfg.ranker} {sign}preproc")]
        click.echo(reports[0].to_table())

    if json_out:
        payload = [json.loads(r.to_json()) for r in reports]
        Path(json_out).write_text(json.dumps(payload, indent=2) + "\n",
                                  encoding="utf-8")
    if plot_dir:
        from .plots import write_bar_chart

        out_dir = Path(plot_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for metric in ("mrr", "map", "ndcg"):
            labels, values = [], []
            for rep in reports:
                if metric == "mrr":
                    labels.append(rep.model)
                    values.append(rep.mrr)
                else:
                    at = rep.map_at if metric == "map" else rep.ndcg_at
                    for k in sorted(at):
                        labels.append(f"{rep.model} @{k}")
                        values.append(at[k])
            write_bar_chart(out_dir / f"{metric}.svg", metric.upper(), labels,
                            values, y_max=1.0)
        click.echo(f"plots written to {plot_dir}")


@cli.command()
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--train-out", required=True, type=click.Path(dir_okay=False))
@click.option("--test-out", required=True, type=click.Path(dir_okay=False))
@click.option("--seed", type=int, default=None)
@click.option("--train-fraction", type=float, default=None)
@pass_config
def split(cfg, dataset_path, train_out, test_out, seed, train_fraction):
    """Stratified train/test split of the single-label rows."""
    spec = SplitSpec(
        train_fraction=train_fraction if train_fraction is not None else cfg.train_fraction,
        seed=seed if seed is not None else cfg.seed)
    rows = single_label_rows(load_dataset(dataset_path))
    train, test = stratified_split(rows, spec)
    save_dataset(train, train_out)
    save_dataset(test, test_out)
    click.echo(f"split {len(rows)} single-label rows -> "
               f"{len(train)} train / {len(test)} test (seed {spec.seed})")


@cli.command("export-train")
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--records", "records_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--negatives", type=click.Choice(["1", "2"]), default="1")
@click.option("--seed", type=int, default=None)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@pass_config
def export_train(cfg, dataset_path, records_path, negatives, seed, out):
    """Export training pairs (1 positive + n random negatives per row)."""
    catalog = _catalog(cfg)
    gaz = load_gazetteer(cfg.gazetteer)
    rows = single_label_rows(load_dataset(dataset_path))
    records = {r.cve_id: r for r in load_records(records_path)}
    texts = {}
    for row in rows:
        if row.cve_id not in records:
            raise DataError(f"no record text for {row.cve_id}")
        texts[row.cve_id] = cleanup(records[row.cve_id].text, gaz).output
    pairs = export_training_pairs(rows, catalog, texts,
                                  negatives_per_positive=int(negatives),
                                  seed=seed if seed is not None else cfg.seed)
    save_training_pairs(pairs, out)
    click.echo(f"wrote {len(pairs)} pairs to {out}")


@cli.command()
@click.argument("dataset_path", type=click.Path(exists=True, dir_okay=False))
@pass_config
def stats(cfg, dataset_path):
    """Dataset statistics: totals and the per-label breakdown."""
    catalog = _catalog(cfg)
    ds = dataset_stats(load_dataset(dataset_path))
    click.echo(f"total  {ds.total}")
    click.echo(f"single {ds.single_count}")
    click.echo(f"causal {ds.causal_count}")
    click.echo("")
    click.echo(f"{'rank':<5} {'cwe_id':<9} count")
    for rank in range(1, 26):
        e = catalog.by_rank(rank)
        click.echo(f"{rank:<5} {e.cwe_id:<9} {ds.per_label_counts[rank]}")


@cli.command()
@click.option("--records", "records_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--assist", type=click.Choice(["none", "bm25", "cosine", "external"]),
              default="none", help="Attach this ranker's suggestions to tasks.")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--journal", type=click.Path(dir_okay=False), default=None)
@click.option("--feedback-log", type=click.Path(dir_okay=False), default=None)
@click.option("--static-dir", type=click.Path(file_okay=False), default=None)
@pass_config
def serve(cfg, records_path, assist, host, port, journal, feedback_log, static_dir):
    """Run the annotation API (and the static UI, if built)."""
    import uvicorn

    from .server import create_app

    catalog = _catalog(cfg)
    records = load_records(records_path)
    rankings = None
    if assist != "none":
        cfg.ranker = assist
        rankings = _rank_all(cfg, catalog, records)
    workflow = Workflow(cfg.annotators, catalog,
                        journal_path=journal or cfg.journal,
                        feedback_path=feedback_log or cfg.feedback_log)
    workflow.add_records(records, rankings=rankings)
    replayed = workflow.replay_journal()
    if replayed:
        click.echo(f"replayed {replayed} journaled decisions")
    app = create_app(workflow, static_dir=static_dir or cfg.static_dir)
    uvicorn.run(app, host=host or cfg.host, port=port or cfg.port, log_level="warning")


@cli.command("score-generated")
@click.option("--predictions", "predictions_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="JSONL of {cve_id, label} generated weakness names.")
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--json-out", type=click.Path(dir_okay=False), default=None)
@pass_config
def score_generated(cfg, predictions_path, dataset_path, json_out):
    """Macro-F1 of generated weakness names against the annotated labels."""
    catalog = _catalog(cfg)
    gold = single_label_rows(load_dataset(dataset_path))
    preds = load_predictions(predictions_path)
    report = macro_f1(preds, gold, catalog)
    width = max(len(c) for c in report.per_class)
    for cls in sorted(report.per_class):
        click.echo(f"{cls:<{width}}  {report.per_class[cls]:.2f}")
    click.echo(f"{'macro avg':<{width}}  {report.macro_avg:.2f}  "
               f"({report.n_classes} classes)")
    if json_out:
        Path(json_out).write_text(json.dumps(
            {"per_class": report.per_class, "macro_avg": report.macro_avg,
             "n_classes": report.n_classes}, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")


def main():
    # exit codes: 1 usage, 2 data, 3 service
    try:
        cli(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except ServiceError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except (DataError, CwemapError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
