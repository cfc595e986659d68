# tests/test_cli.py
import json
import logging

import pytest

from cli.main import EXIT_DATA, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, assemble_datasets, parse_ngram, run
from common.errors import ConfigError, DataError
from conftest import row, write_rows_csv
from corpus.dataset import load_dataset, write_dataset

FAST = ["--strategy", "ovr", "--model", "lr", "--analyzer", "word", "--ngram", "1,1"]


@pytest.fixture(autouse=True)
def _restore_root_logger():
    # run() installs its own handler on the root logger
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def corpus_csv(tmp_path, synthetic):
    path = tmp_path / "corpus.csv"
    write_dataset(synthetic(80, seed=4), str(path))
    return str(path)


@pytest.fixture
def model_path(tmp_path, corpus_csv):
    path = tmp_path / "model.json"
    assert run(["-q", "train", "--dataset", corpus_csv, "--out", str(path), *FAST]) == EXIT_OK
    return str(path)


# ------------------------------
# helpers
# ------------------------------

def test_parse_ngram():
    assert parse_ngram("4,4") == (4, 4)
    assert parse_ngram("3") == (3, 3)
    assert parse_ngram(" 1 , 2 ") == (1, 2)
    for bad in ("", "a,b", "1,2,3"):
        with pytest.raises(ConfigError):
            parse_ngram(bad)


def test_assemble_datasets(corpus_csv):
    found = assemble_datasets([corpus_csv])
    assert list(found) == ["AppReviews", "IssueComments", "Combined"]
    assert len(found["Combined"]) == 80
    assert len(found["AppReviews"]) + len(found["IssueComments"]) == 80
    assert list(assemble_datasets([corpus_csv], ["comments"])) == ["IssueComments"]
    with pytest.raises(ConfigError):
        assemble_datasets([corpus_csv], ["tweets"])


def test_assemble_missing_kind(tmp_path):
    path = write_rows_csv(tmp_path / "c.csv", [row("c1"), row("c2", bits=(0, 0, 0, 1))])
    with pytest.raises(DataError, match="AppReviews"):
        assemble_datasets([path], ["reviews"])


# ------------------------------
# exit codes
# ------------------------------

@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["train", "--dataset", "x.csv"],
    ["grid", "--dataset", "x.csv", "--out", "r.csv", "--format", "html"],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_USAGE
    assert "hci" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["--help"], ["train", "--help"], ["grid", "-h"]])
def test_help_returns_instead_of_exiting(argv, capsys):
    assert run(argv) == EXIT_OK
    assert "usage" in capsys.readouterr().out.lower()


def test_bad_option_values(corpus_csv, tmp_path):
    out = str(tmp_path / "m.json")
    assert run(["-q", "train", "--dataset", corpus_csv, "--out", out, "--model", "knn"]) == EXIT_USAGE
    assert run(["-q", "train", "--dataset", corpus_csv, "--out", out, "--order", "a,b"]) == EXIT_USAGE
    assert run(["-q", "train", "--dataset", corpus_csv, "--out", out, "--feature", "w2v"]) == EXIT_USAGE


def test_missing_file_is_runtime_error(tmp_path):
    assert run(["-q", "stats", "--dataset", str(tmp_path / "nope.csv")]) == EXIT_RUNTIME
    assert run(["-q", "predict", "--model", str(tmp_path / "nope.json"),
                "--in", str(tmp_path / "in.csv")]) == EXIT_RUNTIME


# ------------------------------
# validate / stats / preprocess / export
# ------------------------------

def test_validate(corpus_csv, tmp_path, capsys):
    assert run(["-q", "validate", "--dataset", corpus_csv, "--check-projects"]) == EXIT_OK
    bad = write_rows_csv(tmp_path / "bad.csv", [row("c1"), row("c2", bits=(1, 0, 0, 1))])
    assert run(["-q", "validate", "--dataset", bad]) == EXIT_DATA


def test_validate_invalid_utf8_is_a_data_error(tmp_path):
    path = tmp_path / "bad.csv"
    write_rows_csv(path, [row("c1"), row("c2", text="BADBYTES")])
    path.write_bytes(path.read_bytes().replace(b"BADBYTES", b"\xff\xfe"))
    assert run(["-q", "validate", "--dataset", str(path)]) == EXIT_DATA


def test_stats(tmp_path, capsys):
    rows = [row(f"c{i}", bits=(1, 0, 0, 0) if i < 3 else (0, 0, 0, 1)) for i in range(8)]
    path = write_rows_csv(tmp_path / "c.csv", rows)
    out = tmp_path / "stats.csv"
    assert run(["-q", "stats", "--dataset", path, "--out", str(out)]) == EXIT_OK
    printed = capsys.readouterr().out
    assert "human-centric: 3/8 (37.5%)" in printed
    assert out.read_text().startswith("group,n,human_centric")


def test_preprocess_writes_tokens(tmp_path):
    path = write_rows_csv(tmp_path / "c.csv", [row("c1", text="It WASN'T working!!!")])
    out = tmp_path / "tokens.jsonl"
    assert run(["-q", "preprocess", "--dataset", path, "--out", str(out)]) == EXIT_OK
    rec = json.loads(out.read_text())
    assert rec["id"] == "c1" and rec["tokens"] == ["work"]


def test_export_converts_format(corpus_csv, tmp_path):
    out = tmp_path / "corpus.jsonl"
    assert run(["-q", "export", "--in", corpus_csv, "--out", str(out)]) == EXIT_OK
    assert load_dataset(str(out)).ids == load_dataset(corpus_csv).ids


# ------------------------------
# train / evaluate / predict
# ------------------------------

def test_train_then_evaluate(model_path, corpus_csv, tmp_path, capsys):
    bundle = json.loads(open(model_path, encoding="utf-8").read())
    assert bundle["config_key"] == "Combined|OvR|Tfidf|word|1,1|LR"
    assert bundle["split"]["n_train"] == 60 and bundle["split"]["n_test"] == 20

    report_path = tmp_path / "report.json"
    assert run(["-q", "evaluate", "--model", model_path, "--dataset", corpus_csv,
                "--out", str(report_path)]) == EXIT_OK
    assert "(n=20)" in capsys.readouterr().out
    report = json.loads(report_path.read_text())
    assert report["n"] == 20 and 0.0 <= report["micro_f1"] <= 1.0
    assert "consistent" in report


def test_evaluate_on_other_data_is_a_fingerprint_error(model_path, tmp_path, synthetic):
    other = tmp_path / "other.csv"
    write_dataset(synthetic(80, seed=5), str(other))
    assert run(["-q", "evaluate", "--model", model_path, "--dataset", str(other)]) == EXIT_DATA


def test_predict(model_path, tmp_path):
    inp = write_rows_csv(tmp_path / "in.csv", [{"id": "a", "text": "crash crash battery"},
                                               {"id": "b", "text": "merge the branch"}], columns=["id", "text"])
    out = tmp_path / "pred.jsonl"
    assert run(["-q", "predict", "--model", model_path, "--in", inp, "--out", str(out), "--postprocess"]) == EXIT_OK
    recs = [json.loads(line) for line in out.read_text().splitlines()]
    assert [r["id"] for r in recs] == ["a", "b"]
    for r in recs:
        assert set(r["labels"]) == {"app_usage", "inclusiveness", "user_reaction", "non_human_centric"}
        assert all(isinstance(s, float) for s in r["scores"].values())
        fixed = r["labels_consistent"]
        assert fixed["non_human_centric"] == int(not (fixed["app_usage"] or fixed["inclusiveness"]
                                                      or fixed["user_reaction"]))


def test_predict_empty_input(model_path, tmp_path):
    inp = tmp_path / "empty.csv"
    inp.write_text("")
    out = tmp_path / "pred.jsonl"
    assert run(["-q", "predict", "--model", model_path, "--in", str(inp), "--out", str(out)]) == EXIT_OK
    assert out.read_text() == ""


# ------------------------------
# grid
# ------------------------------

def test_grid_single_row(corpus_csv, tmp_path):
    out = tmp_path / "results.csv"
    argv = ["-q", "grid", "--dataset", corpus_csv, "--kind", "comments", "--strategies", "ovr",
            "--features", "tfidf", "--models", "lr", "--analyzer", "word", "--ngram", "1,1", "--out", str(out)]
    assert run(argv) == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("IssueComments,OvR,Tfidf,word,")
