import csv
import json

import numpy as np
import pytest

from dupliq.cli import main

WORDS = [
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf",
    "hotel", "india", "juliet", "kilo", "lima", "mike", "november",
    "oscar", "papa", "quebec", "romeo", "sierra", "tango",
]


def write_corpus(path, n=80, seed=0):
    """Synthetic pairs: duplicates share shuffled words, negatives do not."""
    rng = np.random.default_rng(seed)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t")
        writer.writerow(["id", "qid1", "qid2", "question1", "question2", "is_duplicate"])
        for i in range(n):
            label = int(rng.random() < 0.5)
            k = int(rng.integers(4, 8))
            words1 = list(rng.choice(WORDS, size=k, replace=False))
            if label:
                words2 = list(rng.permutation(words1))
            else:
                rest = [w for w in WORDS if w not in words1]
                words2 = list(rng.choice(rest, size=min(k, len(rest)), replace=False))
            writer.writerow(
                [i, 2 * i + 1, 2 * i + 2, " ".join(words1) + "?", " ".join(words2) + "?", label]
            )


def write_glove(path, dim=6, seed=1):
    rng = np.random.default_rng(seed)
    with open(path, "w") as fh:
        for w in WORDS:
            vec = " ".join(f"{v:.5f}" for v in rng.normal(size=dim))
            fh.write(f"{w} {vec}\n")


@pytest.fixture
def workspace(tmp_path):
    tsv = tmp_path / "pairs.tsv"
    glove = tmp_path / "vectors.txt"
    write_corpus(tsv)
    write_glove(glove)
    return tmp_path, tsv, glove


def run(args):
    return main([str(a) for a in args])


def test_stats_and_report(workspace, capsys):
    tmp, tsv, _ = workspace
    report = tmp / "stats.json"
    assert run(["stats", tsv, "--report", report]) == 0
    out = capsys.readouterr().out
    assert "total pairs" in out
    doc = json.loads(report.read_text())
    assert doc["results"]["total_pairs"] == 80
    assert doc["command"] == "stats"
    assert "version" in doc


def test_clean_and_split(workspace):
    tmp, tsv, _ = workspace
    cleaned = tmp / "clean.tsv"
    assert run(["clean", tsv, "-o", cleaned, "--report", tmp / "c.json"]) == 0
    assert run([
        "split", cleaned, "--test", "0.25", "--seed", "3",
        "-o-train", tmp / "train.tsv", "-o-test", tmp / "test.tsv",
        "--report", tmp / "s.json",
    ]) == 0
    doc = json.loads((tmp / "s.json").read_text())
    assert doc["results"]["train_rows"] + doc["results"]["test_rows"] == 80


def test_missing_file_exit_code_2(tmp_path, capsys):
    assert run(["stats", tmp_path / "nope.tsv", "--report", tmp_path / "r.json"]) == 2


def test_bad_row_exit_code_1(tmp_path, capsys):
    bad = tmp_path / "bad.tsv"
    bad.write_text(
        "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate\n"
        "0\t1\t2\tfirst question\tsecond question\t2\n"
    )
    assert run(["stats", bad, "--report", tmp_path / "r.json"]) == 1
    assert "line 2" in capsys.readouterr().err


def test_unknown_flag_exit_code_1(workspace, capsys):
    tmp, tsv, _ = workspace
    assert run(["stats", tsv, "--bogus"]) == 1


def test_featurize_requires_embeddings(workspace, capsys):
    tmp, tsv, _ = workspace
    assert run(["featurize", tsv, "-o", tmp / "f.csv", "--report", tmp / "r.json"]) == 1
    assert "--glove or --w2v" in capsys.readouterr().err


def test_full_dense_pipeline(workspace, capsys):
    tmp, tsv, glove = workspace
    features = tmp / "features.csv"
    assert run([
        "featurize", tsv, "--glove", glove, "-o", features, "--report", tmp / "f.json",
    ]) == 0
    doc = json.loads((tmp / "f.json").read_text())
    assert len(doc["results"]["columns"]) == 28

    dropped = tmp / "features20.csv"
    assert run([
        "featurize", tsv, "--glove", glove, "-o", dropped,
        "--drop-paper-eight", "--report", tmp / "f20.json",
    ]) == 0
    doc20 = json.loads((tmp / "f20.json").read_text())
    assert len(doc20["results"]["columns"]) == 20

    model = tmp / "xgb.json"
    assert run([
        "train", "--model", "xgb", "--features", features,
        "--param", "n_estimators=30", "-o", model, "--report", tmp / "t.json",
    ]) == 0
    assert run([
        "eval", "--model", model, "--features", features, "--report", tmp / "e.json",
    ]) == 0
    metrics = json.loads((tmp / "e.json").read_text())["results"]["metrics"]
    assert metrics["accuracy"] >= 0.9  # separable synthetic corpus

    assert run([
        "importance", "--model", model, "--features", features,
        "--report", tmp / "i.json",
    ]) == 0
    ranked = json.loads((tmp / "i.json").read_text())["results"]["ranked"]
    assert len(ranked) == 28
    top = [name for name, _ in ranked[:6]]
    assert set(top) & {"common_words", "token_set_ratio", "token_sort_ratio",
                       "qratio", "wratio", "wmd", "norm_wmd", "cosine"}


def test_knn_model_roundtrip(workspace):
    tmp, tsv, glove = workspace
    features = tmp / "features.csv"
    run(["featurize", tsv, "--glove", glove, "-o", features, "--report", tmp / "f.json"])
    model = tmp / "knn.json"
    assert run([
        "train", "--model", "knn", "--features", features, "-o", model,
        "--report", tmp / "t.json",
    ]) == 0
    assert run([
        "eval", "--model", model, "--features", features, "--report", tmp / "e.json",
    ]) == 0


def test_tfidf_pipeline(workspace):
    tmp, tsv, _ = workspace
    model = tmp / "tfidf.json"
    vectors = tmp / "vectors.npz"
    assert run([
        "tfidf-fit", tsv, "--analyzer", "char", "--ngram-lo", "1", "--ngram-hi", "3",
        "--max-features", "2000", "-o", model, "--report", tmp / "tf.json",
    ]) == 0
    assert run([
        "tfidf-featurize", tsv, "--model", model, "-o", vectors,
        "--report", tmp / "tv.json",
    ]) == 0
    clf = tmp / "xgb-sparse.json"
    assert run([
        "train", "--model", "xgb", "--sparse", vectors,
        "--param", "n_estimators=20", "-o", clf, "--report", tmp / "t.json",
    ]) == 0
    assert run([
        "eval", "--model", clf, "--sparse", vectors, "--report", tmp / "e.json",
    ]) == 0
    acc = json.loads((tmp / "e.json").read_text())["results"]["metrics"]["accuracy"]
    assert acc >= 0.8


def test_grid_command(workspace):
    tmp = workspace[0]
    # xor-patterned features: a stump cannot win, a deeper tree can
    features = tmp / "features.csv"
    with open(features, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["a", "b", "is_duplicate"])
        for _ in range(12):
            for x1, x2 in ((0, 0), (0, 1), (1, 0), (1, 1)):
                writer.writerow([x1, x2, x1 ^ x2])
    spec = tmp / "grid.json"
    spec.write_text(json.dumps([
        {"kind": "decision_tree", "hyperparameters": {"max_depth": 1, "min_samples_leaf": 1}},
        {"kind": "decision_tree", "hyperparameters": {"max_depth": 6, "min_samples_leaf": 1}},
    ]))
    assert run([
        "grid", "--spec", spec, "--features", features,
        "--val-fraction", "0.25", "--report", tmp / "g.json",
    ]) == 0
    doc = json.loads((tmp / "g.json").read_text())
    assert doc["results"]["best"]["hyperparameters"]["max_depth"] == 6


def test_nn_commands(workspace):
    tmp, _, _ = workspace
    prefix = tmp / "net"
    assert run([
        "nn-build", "--arch", "2", "--toy", "-o", prefix, "--report", tmp / "b.json",
    ]) == 0
    assert (tmp / "net.json").exists() and (tmp / "net.bin").exists()

    assert run([
        "nn-train", "--arch", "1", "--toy", "--samples", "40", "--epochs", "5",
        "--batch-size", "20", "--learning-rate", "0.01", "--seed", "1",
        "-o", tmp / "trained", "--report", tmp / "tr.json",
    ]) == 0
    doc = json.loads((tmp / "tr.json").read_text())
    assert len(doc["results"]["loss"]) == 5

    assert run([
        "nn-gradcheck", "--arch", "3", "--toy", "--report", tmp / "gc.json",
    ]) == 0
    worst = json.loads((tmp / "gc.json").read_text())["results"]["max_relative_error"]
    assert worst <= 1e-4


def test_reproduce_table5_subset_and_determinism(workspace):
    tmp, tsv, glove = workspace
    r1 = tmp / "rep1.json"
    r2 = tmp / "rep2.json"
    base = [
        "reproduce", "table5", "--tsv", tsv, "--glove", glove,
        "--sample", "60", "--seed", "7", "--kinds", "xgb,knn",
    ]
    assert run(base + ["--report", r1]) == 0
    assert run(base + ["--report", r2]) == 0
    b1 = r1.read_bytes()
    b2 = r2.read_bytes()
    assert b1 == b2  # byte-identical reports for identical config and seed
    doc = json.loads(b1)
    assert set(doc["results"]["results"]) == {"xgb", "knn"}


def test_reproduce_table7_runs_both_analyzers(workspace):
    tmp, tsv, _ = workspace
    report = tmp / "t7.json"
    assert run([
        "reproduce", "table7", "--tsv", tsv, "--sample", "60", "--seed", "3",
        "--kinds", "xgb", "--max-features", "1500", "--report", report,
    ]) == 0
    doc = json.loads(report.read_text())
    assert set(doc["results"]["results"]) == {"word", "char"}


def test_config_file_defaults_with_flag_override(workspace):
    tmp, tsv, glove = workspace
    config = tmp / "config.json"
    config.write_text(json.dumps({
        "config_version": 1,
        "defaults": {"seed": 9, "test": 0.25},
    }))
    assert run([
        "split", tsv, "--config", config,
        "-o-train", tmp / "a.tsv", "-o-test", tmp / "b.tsv",
        "--report", tmp / "s1.json",
    ]) == 0
    doc = json.loads((tmp / "s1.json").read_text())
    assert doc["config"]["seed"] == 9
    assert doc["config"]["test"] == 0.25
    # explicit flag wins over the config file
    assert run([
        "split", tsv, "--config", config, "--test", "0.5",
        "-o-train", tmp / "c.tsv", "-o-test", tmp / "d.tsv",
        "--report", tmp / "s2.json",
    ]) == 0
    doc2 = json.loads((tmp / "s2.json").read_text())
    assert doc2["config"]["test"] == 0.5
    assert doc2["config"]["seed"] == 9
