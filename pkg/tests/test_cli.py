import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from rtool.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


class TestIngestCommand:
    def test_ingest_and_report(self, runner, tmp_path):
        result = runner.invoke(
            main,
            [
                "ingest",
                "--corpus", "tests/fixtures/corpus_spr.tsv",
                "--modality", "spr",
                "--scores", "tests/fixtures/corpus_scores.tsv",
                "--name", "demo",
                "--out", str(tmp_path / "store"),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "9 observations" in result.output
        assert (tmp_path / "store" / "corpus" / "demo" / "corpus.json").is_file()

    def test_bad_filter_file_is_validation_error(self, runner, tmp_path):
        result = runner.invoke(
            main,
            [
                "ingest",
                "--corpus", "tests/fixtures/corpus_spr.tsv",
                "--modality", "spr",
                "--filter", str(tmp_path / "missing.json"),
                "--out", str(tmp_path / "store"),
            ],
        )
        assert result.exit_code == 2

    def test_malformed_corpus_is_validation_error(self, runner, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text(
            "subject_id\tdoc_id\tsentence_id\tword_pos\tsurface\trt_ms\n"
            "1\td\t1\t1\tthe\tabc\n"
        )
        result = runner.invoke(
            main,
            ["ingest", "--corpus", str(bad), "--modality", "spr", "--out", str(tmp_path / "s")],
        )
        assert result.exit_code == 2
        assert "line 2" in result.output


class TestSurprisalImport:
    def test_ingest_then_import(self, runner, e2e_bundle, tmp_path):
        store = str(tmp_path / "store")
        raw = e2e_bundle["raw_config"]
        corpus_file = raw["corpora"][0]["file"]
        scores_file = raw["corpora"][0]["scores"]
        result = runner.invoke(
            main,
            ["ingest", "--corpus", corpus_file, "--modality", "spr",
             "--scores", scores_file, "--name", "synth", "--out", store],
        )
        assert result.exit_code == 0, result.output
        variant = raw["variants"][0]
        result = runner.invoke(
            main,
            ["surprisal", "import", "--variant", "mock-sm",
             "--meta", variant["meta"], "--tokens", variant["tokens"],
             "--corpus", "synth", "--store", store],
        )
        assert result.exit_code == 0, result.output
        assert "coverage 1.0000" in result.output
        assert "perplexity" in result.output

    def test_variant_name_must_match_meta(self, runner, e2e_bundle, tmp_path):
        store = str(tmp_path / "store")
        raw = e2e_bundle["raw_config"]
        runner.invoke(
            main,
            ["ingest", "--corpus", raw["corpora"][0]["file"], "--modality", "spr",
             "--name", "synth", "--out", store],
        )
        variant = raw["variants"][0]
        result = runner.invoke(
            main,
            ["surprisal", "import", "--variant", "wrong-name",
             "--meta", variant["meta"], "--tokens", variant["tokens"],
             "--corpus", "synth", "--store", store],
        )
        assert result.exit_code == 2

    def test_missing_corpus_rejected(self, runner, e2e_bundle, tmp_path):
        raw = e2e_bundle["raw_config"]
        variant = raw["variants"][0]
        result = runner.invoke(
            main,
            ["surprisal", "import", "--variant", "mock-sm",
             "--meta", variant["meta"], "--tokens", variant["tokens"],
             "--corpus", "absent", "--store", str(tmp_path / "empty")],
        )
        assert result.exit_code == 2


class TestRunCommand:
    def test_full_pipeline_and_trend(self, runner, e2e_bundle, tmp_path):
        store = str(e2e_bundle["store_path"])
        result = runner.invoke(
            main,
            [
                "run",
                "--config", str(e2e_bundle["config_file"]),
                "--store", store,
                "--out", str(tmp_path / "reports"),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "pipeline complete" in result.output
        # artifacts were already fresh from the session fixture
        assert "up to date" in result.output

        trend = runner.invoke(
            main,
            [
                "trend",
                "--family", "mockgpt",
                "--measure", "dll",
                "--corpus", "synth",
                "--store", store,
                "--out", str(tmp_path / "trend.csv"),
                "--plot", str(tmp_path / "trend.svg"),
            ],
        )
        assert trend.exit_code == 0, trend.output
        assert (tmp_path / "trend.csv").read_text().startswith("family,metric,slope")
        assert (tmp_path / "trend.svg").read_text().startswith("<svg")

    def test_missing_config_input_fails_with_2(self, runner, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(
            json.dumps(
                {
                    "corpora": [{"file": "absent.tsv", "modality": "spr"}],
                    "variants": [{"meta": "m.json", "tokens": "t.tsv"}],
                }
            )
        )
        result = runner.invoke(main, ["run", "--config", str(config)])
        assert result.exit_code == 2
        assert "missing input file" in result.output

    def test_subsets_command(self, runner, e2e_bundle, tmp_path):
        store = str(e2e_bundle["store_path"])
        # `run` stores the pipeline config for later subset re-emission
        runner.invoke(
            main,
            [
                "run",
                "--config", str(e2e_bundle["config_file"]),
                "--store", store,
                "--out", str(tmp_path / "r1"),
            ],
        )
        result = runner.invoke(
            main,
            [
                "subsets",
                "--family", "mockgpt",
                "--corpus", "synth",
                "--out", str(tmp_path / "subsets-out"),
                "--store", store,
            ],
        )
        assert result.exit_code == 0, result.output
        out_files = list((tmp_path / "subsets-out").glob("subsets_*_mockgpt.csv"))
        assert out_files


class TestFitCommand:
    def test_fit_baseline_from_store(self, runner, e2e_bundle, tmp_path):
        store = str(e2e_bundle["store_path"])
        # corpus artifact name used by the pipeline is corpus/synth
        result = runner.invoke(
            main,
            [
                "fit",
                "--baseline",
                "--corpus", "synth",
                "--partition", "exploratory",
                "--store", store,
                "--out", str(tmp_path / "fit.json"),
            ],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads((tmp_path / "fit.json").read_text())
        assert payload["converged"] is True
        assert payload["n_obs"] > 0

    def test_variant_and_baseline_are_mutually_exclusive(self, runner):
        result = runner.invoke(main, ["fit", "--baseline", "--variant", "x", "--out", "f.json"])
        assert result.exit_code == 2

    def test_fit_variant_on_heldout_partition(self, runner, e2e_bundle, tmp_path):
        result = runner.invoke(
            main,
            [
                "fit",
                "--variant", "mock-sm",
                "--corpus", "synth",
                "--partition", "heldout",
                "--no-word-intercept",
                "--store", str(e2e_bundle["store_path"]),
                "--out", str(tmp_path / "fit.json"),
            ],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads((tmp_path / "fit.json").read_text())
        assert "surprisal" in payload["fixed_names"]
        # no word_type term in the no-word-intercept spec
        assert all(t["factor"] != "word_type" for t in payload["terms"])


class TestStoreResolution:
    def test_env_var_overrides_store_path(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("RTOOL_STORE", str(tmp_path / "env-store"))
        result = runner.invoke(
            main,
            [
                "ingest",
                "--corpus", "tests/fixtures/corpus_spr.tsv",
                "--modality", "spr",
                "--name", "env",
            ],
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "env-store" / "corpus" / "env" / "corpus.json").is_file()


class TestStageFailure:
    def test_broken_surprisal_file_exits_3(self, runner, tmp_path):
        # config validates (files exist) but alignment fails mid-pipeline
        tokens = tmp_path / "broken.tokens.tsv"
        tokens.write_text("wrong\theader\n", encoding="utf-8")
        meta = tmp_path / "broken.meta.json"
        meta.write_text(
            json.dumps(
                {"family": "other", "name": "broken", "n_params": 1, "context_size": 64}
            )
        )
        config = tmp_path / "config.json"
        config.write_text(
            json.dumps(
                {
                    "corpora": [
                        {
                            "name": "spr",
                            "file": str(Path("tests/fixtures/corpus_spr.tsv").resolve()),
                            "modality": "spr",
                        }
                    ],
                    "variants": [{"meta": str(meta), "tokens": str(tokens)}],
                }
            )
        )
        result = runner.invoke(
            main,
            ["run", "--config", str(config), "--store", str(tmp_path / "s"),
             "--out", str(tmp_path / "r")],
        )
        assert result.exit_code == 3
        assert "align" in result.output
