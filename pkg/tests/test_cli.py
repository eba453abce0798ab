import json
import subprocess
import sys

import pytest
from click.testing import CliRunner

from cwemap.cli import cli
from cwemap.corpus import DatasetRow, LabelAssignment, save_dataset
from cwemap.ingest import save_records
from cwemap.corpus import CveRecord


@pytest.fixture()
def runner():
    return CliRunner()


def small_dataset(tmp_path, n=12):
    rows = [DatasetRow(f"CVE-2020-{1000 + i:04d}", LabelAssignment((3,)))
            for i in range(n)]
    rows += [DatasetRow("CVE-2021-9001", LabelAssignment((2, 25)))]
    path = tmp_path / "dataset.csv"
    save_dataset(rows, path)
    return path, rows


def small_records(tmp_path, rows):
    records = [CveRecord(r.cve_id, "a title",
                         "SQL injection lets attackers execute arbitrary SQL "
                         "commands against the database.")
               for r in rows]
    path = tmp_path / "records.jsonl"
    save_records(records, path)
    return path


class TestStats:
    def test_released_dataset_totals(self, runner, dataset_path):
        result = runner.invoke(cli, ["stats", str(dataset_path)])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0].split() == ["total", "4012"]
        assert lines[1].split() == ["single", "3605"]
        assert lines[2].split() == ["causal", "407"]
        table = {l.split()[1]: int(l.split()[2]) for l in lines[5:]}
        assert table["CWE-79"] == 626
        assert table["CWE-416"] == 35


class TestRank:
    def test_no_overlap_fixture_falls_back_to_catalog_order(self, runner, tmp_path):
        rec = CveRecord("CVE-2020-4242", "", "zzzz qqqq wwww")
        path = tmp_path / "records.jsonl"
        save_records([rec], path)
        result = runner.invoke(cli, ["rank", "--records", str(path),
                                     "--cve", "CVE-2020-4242"])
        assert result.exit_code == 0
        lines = [l for l in result.output.splitlines() if l.strip().startswith(tuple("123456789"))]
        assert lines[0].split()[1] == "CWE-787"
        assert all(l.split()[2] == "0.0000" for l in lines)

    def test_rank_all_writes_jsonl(self, runner, tmp_path):
        ds, rows = small_dataset(tmp_path, n=3)
        records = small_records(tmp_path, rows[:3])
        out = tmp_path / "rankings.jsonl"
        result = runner.invoke(cli, ["rank", "--records", str(records), "--all",
                                     "--out", str(out)])
        assert result.exit_code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 3
        assert len(json.loads(lines[0])["entries"]) == 25


class TestEval:
    def test_eval_prints_table(self, runner, tmp_path):
        ds, rows = small_dataset(tmp_path)
        records = small_records(tmp_path, rows)
        result = runner.invoke(cli, ["eval", "--records", str(records),
                                     "--dataset", str(ds), "--ranker", "bm25"])
        assert result.exit_code == 0
        assert "MRR" in result.output and "MAP@5" in result.output

    def test_ablation_reports_delta(self, runner, tmp_path):
        ds, rows = small_dataset(tmp_path)
        records = small_records(tmp_path, rows)
        result = runner.invoke(cli, ["eval", "--records", str(records),
                                     "--dataset", str(ds), "--ablate-preproc"])
        assert result.exit_code == 0
        assert "MRR delta" in result.output

    def test_plots_written(self, runner, tmp_path):
        ds, rows = small_dataset(tmp_path)
        records = small_records(tmp_path, rows)
        plot_dir = tmp_path / "plots"
        result = runner.invoke(cli, ["eval", "--records", str(records),
                                     "--dataset", str(ds),
                                     "--plot-dir", str(plot_dir)])
        assert result.exit_code == 0
        for name in ("mrr.svg", "map.svg", "ndcg.svg"):
            svg = (plot_dir / name).read_text()
            assert svg.startswith("<svg")


class TestSplitAndExport:
    def test_split_deterministic(self, runner, tmp_path, dataset_path):
        t1, v1 = tmp_path / "t1.csv", tmp_path / "v1.csv"
        t2, v2 = tmp_path / "t2.csv", tmp_path / "v2.csv"
        for t, v in ((t1, v1), (t2, v2)):
            result = runner.invoke(cli, ["split", "--dataset", str(dataset_path),
                                         "--train-out", str(t), "--test-out", str(v),
                                         "--seed", "13"])
            assert result.exit_code == 0
        assert t1.read_bytes() == t2.read_bytes()
        assert v1.read_bytes() == v2.read_bytes()

    def test_export_train_counts(self, runner, tmp_path):
        ds, rows = small_dataset(tmp_path)
        records = small_records(tmp_path, rows)
        out = tmp_path / "pairs.jsonl"
        result = runner.invoke(cli, ["export-train", "--dataset", str(ds),
                                     "--records", str(records),
                                     "--negatives", "1", "--out", str(out)])
        assert result.exit_code == 0
        assert len(out.read_text().splitlines()) == 24  # 12 single rows * 2


class TestScoreGenerated:
    def test_macro_f1_output(self, runner, tmp_path, catalog):
        ds, rows = small_dataset(tmp_path, n=4)
        preds = tmp_path / "preds.jsonl"
        name = catalog.by_rank(3).name
        with preds.open("w") as f:
            for r in rows[:4]:
                f.write(json.dumps({"cve_id": r.cve_id, "label": name}) + "\n")
        result = runner.invoke(cli, ["score-generated", "--predictions", str(preds),
                                     "--dataset", str(ds)])
        assert result.exit_code == 0
        assert "macro avg" in result.output
        assert "1.00" in result.output


class TestPreprocessCommand:
    def test_sentence_export_for_sidecar(self, runner, tmp_path):
        ds, rows = small_dataset(tmp_path, n=2)
        records = small_records(tmp_path, rows[:2])
        sentences = tmp_path / "sentences.jsonl"
        result = runner.invoke(cli, ["preprocess", "--records", str(records),
                                     "--sentences-out", str(sentences)])
        assert result.exit_code == 0
        lines = [json.loads(l) for l in sentences.read_text().splitlines()]
        keys = {l["key"] for l in lines}
        assert sum(1 for k in keys if k.startswith("cve:")) == 2
        assert sum(1 for k in keys if k.startswith("cwe:")) == 25
        assert all(isinstance(l["sentences"], list) for l in lines)


class TestIngestNarrow:
    def test_ingest_then_narrow(self, runner, tmp_path):
        feed = tmp_path / "feed" / "2020" / "xxx"
        feed.mkdir(parents=True)
        doc = {
            "CVE_data_meta": {"ID": "CVE-2020-5555", "STATE": "PUBLIC"},
            "description": {"description_data": [
                {"lang": "eng", "value": "SQL injection in the login form "
                                         "allows arbitrary SQL commands."}]},
        }
        (feed / "CVE-2020-5555.json").write_text(json.dumps(doc))
        records_out = tmp_path / "records.jsonl"
        result = runner.invoke(cli, ["ingest", "--feed-dir", str(tmp_path / "feed"),
                                     "--out", str(records_out)])
        assert result.exit_code == 0

        candidates_out = tmp_path / "candidates.csv"
        result = runner.invoke(cli, ["narrow", "--records", str(records_out),
                                     "--out", str(candidates_out), "--top-n", "5"])
        assert result.exit_code == 0
        lines = candidates_out.read_text().splitlines()
        assert lines[0] == "cve_id,best_rank,score"
        assert lines[1].startswith("CVE-2020-5555,3,")


class TestConfig:
    def test_config_supplies_defaults_and_flags_win(self, runner, tmp_path, dataset_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text('seed = 1\ntrain_fraction = 0.8\n')
        from_cfg_t = tmp_path / "cfg_train.csv"
        from_cfg_v = tmp_path / "cfg_test.csv"
        result = runner.invoke(cli, ["--config", str(cfg), "split",
                                     "--dataset", str(dataset_path),
                                     "--train-out", str(from_cfg_t),
                                     "--test-out", str(from_cfg_v)])
        assert result.exit_code == 0
        assert "seed 1" in result.output

        override_t = tmp_path / "ovr_train.csv"
        override_v = tmp_path / "ovr_test.csv"
        result = runner.invoke(cli, ["--config", str(cfg), "split",
                                     "--dataset", str(dataset_path),
                                     "--train-out", str(override_t),
                                     "--test-out", str(override_v),
                                     "--seed", "13"])
        assert result.exit_code == 0
        assert "seed 13" in result.output
        assert from_cfg_t.read_bytes() != override_t.read_bytes()

        direct_t = tmp_path / "direct_train.csv"
        direct_v = tmp_path / "direct_test.csv"
        runner.invoke(cli, ["split", "--dataset", str(dataset_path),
                            "--train-out", str(direct_t),
                            "--test-out", str(direct_v), "--seed", "13"])
        assert override_t.read_bytes() == direct_t.read_bytes()

    def test_unknown_config_key_exits_2(self, tmp_path, dataset_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text('frobnication = true\n')
        proc = subprocess.run(
            [sys.executable, "-m", "cwemap.cli", "--config", str(cfg),
             "stats", str(dataset_path)],
            capture_output=True, text=True)
        assert proc.returncode == 2
        assert "frobnication" in proc.stderr


class TestExitCodes:
    def test_usage_error_exits_1(self):
        proc = subprocess.run([sys.executable, "-m", "cwemap.cli", "frobnicate"],
                              capture_output=True, text=True)
        assert proc.returncode == 1

    def test_data_error_exits_2(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("wrong,header\n")
        proc = subprocess.run(
            [sys.executable, "-m", "cwemap.cli", "stats", str(bad)],
            capture_output=True, text=True)
        assert proc.returncode == 2
        assert "error" in proc.stderr.lower()

    def test_ok_exits_0(self, dataset_path):
        proc = subprocess.run(
            [sys.executable, "-m", "cwemap.cli", "stats", str(dataset_path)],
            capture_output=True, text=True)
        assert proc.returncode == 0
