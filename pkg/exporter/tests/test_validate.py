import json

import pytest

from toxspan_exporter.cli import main
from toxspan_exporter.export import ExportOptions, export
from toxspan_exporter.validate import pooling_self_test, validate


def write_lines(path, lines):
    path.write_text("\n".join(json.dumps(l) for l in lines) + "\n")
    return path


HEADER = {"format": "toxspan-attn", "version": 1, "checkpoint": "x",
          "emb_dim": None, "truncated": 0}


def test_well_formed_file(tmp_path):
    path = write_lines(tmp_path / "ok.jsonl", [
        HEADER,
        {"id": "0", "text": "ab cd", "sent_prob": 0.5,
         "words": [{"start": 0, "end": 2, "attn": 0.1},
                   {"start": 3, "end": 5, "attn": 0.2}]},
    ])
    report = validate(path)
    assert report.ok
    assert report.n_records == 1 and report.n_words == 2


def test_out_of_bounds_span_listed(tmp_path):
    path = write_lines(tmp_path / "bad.jsonl", [
        HEADER,
        {"id": "7", "text": "ab", "sent_prob": 0.5,
         "words": [{"start": 0, "end": 9, "attn": 0.1}]},
    ])
    report = validate(path)
    assert not report.ok
    assert any("record 7" in v and "out of bounds" in v for v in report.violations)


def test_mixed_embedding_lengths_listed(tmp_path):
    header = dict(HEADER, emb_dim=3)
    path = write_lines(tmp_path / "bad.jsonl", [
        header,
        {"id": "0", "text": "ab cd", "sent_prob": 0.5,
         "words": [{"start": 0, "end": 2, "attn": 0.1, "emb": [1, 2, 3]},
                   {"start": 3, "end": 5, "attn": 0.1, "emb": [1, 2]}]},
    ])
    report = validate(path)
    assert any("embedding length 2" in v for v in report.violations)


def test_negative_attention_listed(tmp_path):
    path = write_lines(tmp_path / "bad.jsonl", [
        HEADER,
        {"id": "0", "text": "ab", "sent_prob": 0.5,
         "words": [{"start": 0, "end": 2, "attn": -0.5}]},
    ])
    report = validate(path)
    assert any("attention" in v for v in report.violations)


def test_bad_probability_listed(tmp_path):
    path = write_lines(tmp_path / "bad.jsonl", [
        HEADER,
        {"id": "0", "text": "ab", "sent_prob": 1.7, "words": []},
    ])
    report = validate(path)
    assert any("sent_prob" in v for v in report.violations)


def test_unsorted_words_listed(tmp_path):
    path = write_lines(tmp_path / "bad.jsonl", [
        HEADER,
        {"id": "0", "text": "ab cd", "sent_prob": 0.5,
         "words": [{"start": 3, "end": 5, "attn": 0.1},
                   {"start": 0, "end": 2, "attn": 0.1}]},
    ])
    report = validate(path)
    assert any("not sorted" in v for v in report.violations)


def test_pooling_self_test_runs():
    pooling_self_test()


def test_cli_validate_exit_codes(tmp_path, tiny_checkpoint, small_corpus):
    good = tmp_path / "good.jsonl"
    export(tiny_checkpoint, small_corpus, good)
    assert main(["validate", str(good)]) == 0
    bad = write_lines(tmp_path / "bad.jsonl", [
        HEADER,
        {"id": "0", "text": "ab", "sent_prob": 0.5,
         "words": [{"start": 0, "end": 5, "attn": 0.1}]},
    ])
    assert main(["validate", str(bad)]) == 1


def test_cli_export(tmp_path, tiny_checkpoint, small_corpus, capsys):
    out = tmp_path / "out.jsonl"
    assert main([
        "export", "--model", tiny_checkpoint, "--input", small_corpus,
        "--out", str(out), "--max-tokens", "32",
    ]) == 0
    assert "exported 6 rows" in capsys.readouterr().out
    assert validate(out).ok
