"""Run a sequence-classification checkpoint and dump per-word attention,
sentence hate probability, and (optionally) embeddings to the interchange
file the toxspan toolkit consumes.

All word offsets index the ORIGINAL input text: the fast tokenizer's offset
mapping locates each subword, subwords are snapped to the primary
tokenizer's word spans by maximal overlap, and a word's attention is the
arithmetic mean of its subwords' scores.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass

import numpy as np
import torch

from .words import word_spans_for_csv

FORMAT_NAME = "toxspan-attn"
FORMAT_VERSION = 1

HEAD_POOLS = ("mean", "max")
ATTN_MODES = ("cls", "mean")


@dataclass
class ExportOptions:
    max_tokens: int = 400
    layer: int = -1
    head_pool: str = "mean"
    attn_mode: str = "cls"
    toxic_class: int = 1
    with_embeddings: bool = False
    batch_size: int = 8
    text_col: str = "text"
    limit: int | None = None

    def __post_init__(self) -> None:
        if self.max_tokens < 4:
            raise ValueError("max_tokens must be at least 4")
        if self.head_pool not in HEAD_POOLS:
            raise ValueError(f"head_pool must be one of {HEAD_POOLS}")
        if self.attn_mode not in ATTN_MODES:
            raise ValueError(f"attn_mode must be one of {ATTN_MODES}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class ExportStats:
    n_rows: int = 0
    n_truncated: int = 0
    emb_dim: int | None = None
    checkpoint_digest: str = ""


def load_checkpoint(path_or_id: str):
    """Tokenizer + eval-mode model; eager attention so weights are exposed."""
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(path_or_id, use_fast=True)
    if not tokenizer.is_fast:
        raise RuntimeError("a fast tokenizer (offset mapping support) is required")
    model = AutoModelForSequenceClassification.from_pretrained(
        path_or_id, attn_implementation="eager"
    )
    model.eval()
    return tokenizer, model


def checkpoint_digest(model) -> str:
    """sha256 over parameter names, shapes and bytes; stable across loads."""
    digest = hashlib.sha256()
    for name, tensor in sorted(model.state_dict().items()):
        digest.update(name.encode())
        digest.update(str(tuple(tensor.shape)).encode())
        digest.update(tensor.detach().cpu().numpy().tobytes())
    return digest.hexdigest()[:16]


def pool_heads(layer_attention: torch.Tensor, head_pool: str) -> torch.Tensor:
    """(heads, seq, seq) -> (seq, seq)."""
    if head_pool == "mean":
        return layer_attention.mean(dim=0)
    return layer_attention.max(dim=0).values


def subword_scores(attention: torch.Tensor, mask: torch.Tensor, attn_mode: str) -> np.ndarray:
    """Per-subword importance from a pooled (seq, seq) attention matrix.

    'cls': attention the first position pays to each subword.
    'mean': mean attention received over all unmasked query positions.
    """
    if attn_mode == "cls":
        scores = attention[0]
    else:
        m = mask.bool()
        scores = attention[m].mean(dim=0)
    return scores.detach().cpu().numpy()


def group_subwords(
    offsets: list[tuple[int, int]],
    scores: np.ndarray,
    word_spans: list[tuple[int, int]],
) -> list[list[int]]:
    """Indices of the subwords backing each word, by maximal overlap.

    Zero-length offsets (special tokens) are skipped; a subword overlapping
    several words goes to the one with the largest overlap, earlier word on
    ties. Words whose subwords were all truncated away end up empty.
    """
    groups: list[list[int]] = [[] for _ in word_spans]
    for si, (ss, se) in enumerate(offsets):
        if se <= ss:
            continue
        best, best_overlap = -1, 0
        for wi, (ws, we) in enumerate(word_spans):
            overlap = min(se, we) - max(ss, ws)
            if overlap > best_overlap:
                best, best_overlap = wi, overlap
        if best >= 0:
            groups[best].append(si)
    return groups


def _format_float(x: float, sig: int) -> float:
    return float(f"{x:.{sig}g}")


def _read_rows(csv_path: str, text_col: str, limit: int | None):
    with open(csv_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or text_col not in reader.fieldnames:
            raise RuntimeError(f"{csv_path}: no {text_col!r} column")
        for i, row in enumerate(reader):
            if limit is not None and i >= limit:
                break
            yield str(i), row[text_col]


def export(model_path: str, input_csv: str, out_path: str,
           options: ExportOptions | None = None) -> ExportStats:
    options = options or ExportOptions()
    tokenizer, model = load_checkpoint(model_path)
    stats = ExportStats(checkpoint_digest=checkpoint_digest(model))
    if options.with_embeddings:
        stats.emb_dim = int(model.config.hidden_size)

    word_spans = word_spans_for_csv(input_csv, limit=options.limit)
    rows = list(_read_rows(input_csv, options.text_col, options.limit))

    records: list[dict] = []
    for lo in range(0, len(rows), options.batch_size):
        chunk = rows[lo : lo + options.batch_size]
        texts = [text for _, text in chunk]
        plain = tokenizer(texts, add_special_tokens=True)
        encoded = tokenizer(
            texts,
            return_offsets_mapping=True,
            return_tensors="pt",
            padding=True,
            truncation=True,
            max_length=options.max_tokens,
        )
        with torch.no_grad():
            out = model(
                input_ids=encoded["input_ids"],
                attention_mask=encoded["attention_mask"],
                output_attentions=True,
                output_hidden_states=options.with_embeddings,
            )
        probs = torch.softmax(out.logits, dim=-1)
        layer = out.attentions[options.layer]
        hidden = out.hidden_states[-1] if options.with_embeddings else None

        for bi, (row_id, text) in enumerate(chunk):
            stats.n_rows += 1
            truncated = len(plain["input_ids"][bi]) > options.max_tokens
            if truncated:
                stats.n_truncated += 1
            mask = encoded["attention_mask"][bi]
            n_real = int(mask.sum())
            pooled = pool_heads(layer[bi], options.head_pool)
            scores = subword_scores(pooled, mask, options.attn_mode)
            offsets = [tuple(map(int, o)) for o in encoded["offset_mapping"][bi][:n_real]]
            spans = word_spans.get(row_id, [])
            groups = group_subwords(offsets, scores[:n_real], spans)

            words = []
            for wi, (ws, we) in enumerate(spans):
                group = groups[wi]
                if not group:
                    continue  # beyond the truncation horizon
                attn = float(np.mean([scores[si] for si in group]))
                rec: dict = {"start": ws, "end": we,
                             "attn": _format_float(max(attn, 0.0), 6)}
                if options.with_embeddings:
                    emb = hidden[bi][group].mean(dim=0).detach().cpu().numpy()
                    rec["emb"] = [_format_float(float(x), 5) for x in emb]
                words.append(rec)
            record: dict = {
                "id": row_id,
                "text": text,
                "sent_prob": _format_float(float(probs[bi, options.toxic_class]), 6),
                "words": words,
            }
            if truncated:
                record["truncated"] = True
            records.append(record)

    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(
            json.dumps(
                {
                    "format": FORMAT_NAME,
                    "version": FORMAT_VERSION,
                    "checkpoint": stats.checkpoint_digest,
                    "emb_dim": stats.emb_dim,
                    "truncated": stats.n_truncated,
                }
            )
            + "\n"
        )
        for record in records:
            fh.write(json.dumps(record) + "\n")
    return stats
