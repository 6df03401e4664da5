"""End-to-end: export from a checkpoint, then drive the toxspan CLI on the
exported file (attention rules, grid search, embedding-backed CRF)."""

import csv
import subprocess
import sys

import pytest

from toxspan_exporter.export import ExportOptions, export


def toxspan(*args):
    return subprocess.run(
        [sys.executable, "-m", "toxspan.cli", *args],
        capture_output=True, text=True,
    )


@pytest.fixture(scope="module")
def annotated_corpus(tmp_path_factory):
    """Rows with gold spans over words the tiny vocab can handle."""
    rows = [
        ("[8, 9, 10, 11, 12, 13]", "you are stupid and he is quiet"),
        ("[]", "the river is quiet and the stone is still"),
        ("[4, 5, 6, 7, 8]", "what idiot said that"),
        ("[12, 13, 14, 15, 16]", "he is a total liars mess"),
        ("[0, 1, 2, 3]", "fool me once and never again"),
        ("[]", "man is he quiet today"),
    ]
    path = tmp_path_factory.mktemp("itg") / "gold.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["spans", "text"])
        writer.writerows(rows)
    return str(path)


@pytest.fixture(scope="module")
def exported(tiny_checkpoint, annotated_corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("itg") / "scores.jsonl"
    export(
        tiny_checkpoint, annotated_corpus, out,
        ExportOptions(with_embeddings=True),
    )
    return str(out)


def test_select_attn_consumes_export(exported, annotated_corpus, tmp_path):
    pred = tmp_path / "attn.tsv"
    proc = toxspan(
        "select-attn", "--interchange", exported, "--rule", "R3",
        "--gate", "0.0", "--out", str(pred),
    )
    assert proc.returncode == 0, proc.stderr
    assert len(pred.read_text().splitlines()) == 6
    proc = toxspan("eval", "--pred", str(pred), "--gold", annotated_corpus)
    assert proc.returncode == 0, proc.stderr
    assert "corpus F1:" in proc.stdout


def test_gridsearch_attn_consumes_export(exported, annotated_corpus):
    proc = toxspan(
        "gridsearch-attn", "--interchange", exported, "--gold", annotated_corpus,
        "--thresholds", "0,0.01", "--percentiles", "0.5,1.0",
    )
    assert proc.returncode == 0, proc.stderr
    assert "best cell" in proc.stdout


def test_embedding_backed_crf(exported, annotated_corpus, tmp_path):
    model = tmp_path / "emb.crf"
    proc = toxspan(
        "train-crf", "--input", annotated_corpus, "--model", str(model),
        "--interchange", exported, "--epochs", "2", "--hash-bits", "8",
        "--hidden-layers", "2", "--hidden-width", "8", "--seed", "1",
    )
    assert proc.returncode == 0, proc.stderr
    pred = tmp_path / "emb.tsv"
    proc = toxspan(
        "predict-crf", "--model", str(model), "--input", annotated_corpus,
        "--interchange", exported, "--out", str(pred),
    )
    assert proc.returncode == 0, proc.stderr
    assert len(pred.read_text().splitlines()) == 6
