"""Validator for interchange files.

Checks the header, then every record: required fields, probability and
attention ranges, word offsets as valid in-bounds slices, and embedding
length uniformity.  Also runs a built-in synthetic pooling fixture so a
broken mean-pooling implementation cannot slip through silently.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .export import FORMAT_NAME, FORMAT_VERSION, group_subwords


@dataclass
class ValidationReport:
    n_records: int = 0
    n_words: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, record_id: str, message: str) -> None:
        self.violations.append(f"record {record_id}: {message}")


def pooling_self_test() -> None:
    """Synthetic tokenizer case: pooled word attention must equal the
    mean of its subword scores, with maximal-overlap grouping."""
    #               "aa bbcc d"  -> words (0,2) (3,7) (8,9)
    word_spans = [(0, 2), (3, 7), (8, 9)]
    # subwords: special (0,0), "aa", "bb", "cc", "d"
    offsets = [(0, 0), (0, 2), (3, 5), (5, 7), (8, 9)]
    scores = np.array([9.0, 0.2, 0.4, 0.6, 0.8])
    groups = group_subwords(offsets, scores, word_spans)
    pooled = [float(np.mean([scores[i] for i in g])) for g in groups]
    expected = [0.2, 0.5, 0.8]
    if not all(abs(a - b) < 1e-12 for a, b in zip(pooled, expected)):
        raise AssertionError(f"pooling self-test failed: {pooled} != {expected}")


def validate(path) -> ValidationReport:
    report = ValidationReport()
    pooling_self_test()
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError:
            report.violations.append("header: not valid JSON")
            return report
        if header.get("format") != FORMAT_NAME:
            report.violations.append(f"header: format {header.get('format')!r}")
        if header.get("version") != FORMAT_VERSION:
            report.violations.append(f"header: version {header.get('version')!r}")
        emb_dim = header.get("emb_dim")

        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                report.violations.append(f"line {lineno}: not valid JSON")
                continue
            report.n_records += 1
            rid = str(rec.get("id", f"line{lineno}"))
            text = rec.get("text")
            if not isinstance(text, str):
                report.add(rid, "missing or non-string text")
                continue
            prob = rec.get("sent_prob")
            if not isinstance(prob, (int, float)) or not 0.0 <= prob <= 1.0:
                report.add(rid, f"sent_prob {prob!r} outside [0, 1]")
            words = rec.get("words")
            if not isinstance(words, list):
                report.add(rid, "missing words list")
                continue
            prev_start = -1
            for w in words:
                report.n_words += 1
                start, end = w.get("start"), w.get("end")
                if (
                    not isinstance(start, int)
                    or not isinstance(end, int)
                    or not 0 <= start < end <= len(text)
                ):
                    report.add(rid, f"word span ({start}, {end}) out of bounds")
                    continue
                if start <= prev_start:
                    report.add(rid, f"word at {start} not sorted after {prev_start}")
                prev_start = start
                attn = w.get("attn")
                if (
                    not isinstance(attn, (int, float))
                    or not math.isfinite(attn)
                    or attn < 0
                ):
                    report.add(rid, f"attention {attn!r} not finite and >= 0")
                if "emb" in w and w["emb"] is not None:
                    if emb_dim is None:
                        report.add(rid, "embedding present but header emb_dim is null")
                    elif len(w["emb"]) != emb_dim:
                        report.add(
                            rid,
                            f"embedding length {len(w['emb'])} != header {emb_dim}",
                        )
                elif emb_dim is not None:
                    report.add(rid, "header declares emb_dim but word has no emb")
    return report
