"""Reader for the encoder interchange file.

Line-delimited JSON: a header object, then one record per post carrying the
sentence-level hate probability and per-word attention (plus optional POS
and embedding).  Word offsets always index the ORIGINAL post text.  The
file is produced by the standalone exporter; this side only consumes it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from ..baselines import hate_hits
from ..corpus import Lexicon, SentimentLexicon
from ..errors import DataError, ValidationError
from ..tokenizer import Token
from .postag import UNIVERSAL_TAGS, pos_tag

FORMAT_NAME = "toxspan-attn"
FORMAT_VERSION = 1


@dataclass(frozen=True, slots=True)
class WordScore:
    token: Token
    attn: float
    pos: str = "X"
    polarity: float = 0.0
    is_hate: bool = False
    emb: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.attn) and self.attn >= 0):
            raise ValidationError(f"attention score must be finite and >= 0, got {self.attn}")
        if self.pos not in UNIVERSAL_TAGS:
            raise ValidationError(f"unknown POS tag {self.pos!r}")
        if not -1.0 <= self.polarity <= 1.0:
            raise ValidationError(f"polarity {self.polarity} out of [-1, 1]")


@dataclass(frozen=True, slots=True)
class ScoredPost:
    id: str
    text: str
    words: tuple[WordScore, ...]
    sent_prob: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.sent_prob <= 1.0:
            raise ValidationError(f"sent_prob {self.sent_prob} out of [0, 1]")
        prev_start = -1
        for w in self.words:
            tok = w.token
            if not (0 <= tok.start < tok.end <= len(self.text)):
                raise ValidationError(
                    f"post {self.id}: word span ({tok.start}, {tok.end}) out of bounds"
                )
            if tok.start <= prev_start:
                raise ValidationError(f"post {self.id}: words not sorted by start")
            prev_start = tok.start


@dataclass(frozen=True, slots=True)
class InterchangeHeader:
    version: int
    checkpoint: str
    emb_dim: int | None
    truncated: int


def _parse_word(obj: dict, text: str, post_id: str, emb_dim: int | None) -> WordScore:
    try:
        start, end, attn = int(obj["start"]), int(obj["end"]), float(obj["attn"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"post {post_id}: bad word record ({exc})") from None
    if not (0 <= start < end <= len(text)):
        raise DataError(f"post {post_id}: word span ({start}, {end}) out of bounds")
    pos = obj.get("pos", "X")
    emb = None
    if "emb" in obj and obj["emb"] is not None:
        emb = np.asarray(obj["emb"], dtype=np.float64)
        if emb_dim is not None and emb.shape != (emb_dim,):
            raise DataError(
                f"post {post_id}: embedding length {emb.shape} != header emb_dim {emb_dim}"
            )
    token = Token.make(text, start, end)
    try:
        return WordScore(token, attn, pos=pos, emb=emb)
    except ValidationError as exc:
        raise DataError(f"post {post_id}: {exc}") from None


def read_interchange(path) -> tuple[InterchangeHeader, list[ScoredPost]]:
    """Parse and validate an interchange file."""
    posts: list[ScoredPost] = []
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise DataError(f"{path}: missing header line")
        try:
            head = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: header is not valid JSON ({exc})") from None
        if head.get("format") != FORMAT_NAME:
            raise DataError(f"{path}: not an interchange file (format={head.get('format')!r})")
        if head.get("version") != FORMAT_VERSION:
            raise DataError(f"{path}: unsupported version {head.get('version')!r}")
        header = InterchangeHeader(
            version=head["version"],
            checkpoint=str(head.get("checkpoint", "")),
            emb_dim=head.get("emb_dim"),
            truncated=int(head.get("truncated", 0)),
        )
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: bad record ({exc})") from None
            try:
                post_id = str(obj["id"])
                text = obj["text"]
                sent_prob = float(obj["sent_prob"])
                words = tuple(
                    _parse_word(w, text, post_id, header.emb_dim) for w in obj["words"]
                )
                posts.append(ScoredPost(post_id, text, words, sent_prob))
            except (KeyError, TypeError, ValidationError) as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    return header, posts


def write_interchange(
    path,
    posts: Iterable[ScoredPost],
    checkpoint: str = "",
    emb_dim: int | None = None,
    truncated: int = 0,
) -> None:
    """Write posts in the interchange format (mainly for tests/fixtures;
    the exporter has its own writer)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            json.dumps(
                {
                    "format": FORMAT_NAME,
                    "version": FORMAT_VERSION,
                    "checkpoint": checkpoint,
                    "emb_dim": emb_dim,
                    "truncated": truncated,
                }
            )
            + "\n"
        )
        for post in posts:
            words = []
            for w in post.words:
                rec: dict = {"start": w.token.start, "end": w.token.end,
                             "attn": float(f"{w.attn:.6g}")}
                if w.pos != "X":
                    rec["pos"] = w.pos
                if w.emb is not None:
                    rec["emb"] = [float(f"{x:.5g}") for x in w.emb]
                words.append(rec)
            fh.write(
                json.dumps(
                    {"id": post.id, "text": post.text,
                     "sent_prob": post.sent_prob, "words": words}
                )
                + "\n"
            )


def enrich(
    posts: Sequence[ScoredPost],
    hate_lexicon: Lexicon | None = None,
    sentiment: SentimentLexicon | None = None,
    tag_missing_pos: bool = True,
) -> list[ScoredPost]:
    """Fill polarity, is_hate, and missing POS tags from the lexicons."""
    out = []
    for post in posts:
        tokens = [w.token for w in post.words]
        hates = hate_hits(tokens, hate_lexicon) if hate_lexicon else [False] * len(tokens)
        words = []
        for w, hate in zip(post.words, hates):
            pos = w.pos
            if pos == "X" and tag_missing_pos:
                pos = pos_tag(w.token)
            pol = sentiment.polarity(w.token.norm) if sentiment else w.polarity
            words.append(replace(w, pos=pos, polarity=pol, is_hate=hate))
        out.append(ScoredPost(post.id, post.text, tuple(words), post.sent_prob))
    return out
