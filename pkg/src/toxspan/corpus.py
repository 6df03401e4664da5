"""Dataset ingestion, lexicons, and offset-preserving normalization.

Loaders are deliberately forgiving about annotation noise (the span data
contains out-of-bounds and mid-word annotations) but strict about file
structure: a missing column is fatal, a bad row is skipped and counted.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, ValidationError
from .spans import CharIndexSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class AnnotatedPost:
    id: str
    text: str
    gold: CharIndexSet


@dataclass(frozen=True, slots=True)
class SentencePost:
    id: str
    text: str
    toxicity: float
    hateful: bool


class OffsetMap:
    """Monotone map from normalized-text positions to original positions."""

    __slots__ = ("_orig",)

    def __init__(self, orig_positions: list[int]) -> None:
        self._orig = tuple(orig_positions)

    def to_original(self, pos: int) -> int:
        return self._orig[pos]

    def span_to_original(self, start: int, end: int) -> tuple[int, int]:
        """Map a half-open normalized span to a half-open original span."""
        if end <= start:
            raise ValidationError(f"empty span ({start}, {end})")
        return self._orig[start], self._orig[end - 1] + 1

    def __len__(self) -> int:
        return len(self._orig)


def normalize(text: str) -> tuple[str, OffsetMap]:
    """Lowercase and strip punctuation, keeping a map back to the original.

    Alphanumerics and whitespace always survive.  A run of other characters
    survives only when it is flanked by alphanumerics on both sides (the
    mid-word case: "a$$hole" stays intact, a trailing "!" goes).  Lowercasing
    is restricted to single-scalar mappings so positions stay 1:1.
    """
    out: list[str] = []
    positions: list[int] = []

    def keep(idx: int) -> None:
        low = text[idx].lower()
        out.append(low if len(low) == 1 else text[idx])
        positions.append(idx)

    n = len(text)
    i = 0
    while i < n:
        c = text[i]
        if c.isalnum() or c.isspace():
            keep(i)
            i += 1
            continue
        k = i
        while k < n and not (text[k].isalnum() or text[k].isspace()):
            k += 1
        if i > 0 and text[i - 1].isalnum() and k < n and text[k].isalnum():
            for j in range(i, k):
                keep(j)
        i = k
    return "".join(out), OffsetMap(positions)


def normalize_term(term: str) -> str:
    """Normalization applied to lexicon entries; same rules as post text."""
    return normalize(term)[0].strip()


@dataclass(frozen=True, slots=True)
class Lexicon:
    """Set of normalized lowercase terms; entries may be multiword."""

    terms: frozenset[str]

    def __contains__(self, term: str) -> bool:
        return term in self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def max_words(self) -> int:
        return max((t.count(" ") + 1 for t in self.terms), default=1)


class SentimentLexicon:
    """Map term -> polarity in [-1, 1]; unknown terms score 0."""

    __slots__ = ("_scores",)

    def __init__(self, scores: dict[str, float]) -> None:
        for term, pol in scores.items():
            if not term:
                raise ValidationError("empty sentiment term")
            if not -1.0 <= pol <= 1.0:
                raise ValidationError(f"polarity {pol} out of [-1,1] for {term!r}")
        self._scores = dict(scores)

    def polarity(self, term: str) -> float:
        return self._scores.get(term, 0.0)

    def __len__(self) -> int:
        return len(self._scores)


def load_lexicon(path) -> Lexicon:
    """One term per line; ``#`` starts a comment; terms are normalized."""
    terms = set()
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            term = normalize_term(line)
            if term:
                terms.add(term)
    return Lexicon(frozenset(terms))


def load_sentiment_lexicon(path) -> SentimentLexicon:
    """``term<TAB>polarity`` per line; ``#`` comments allowed."""
    scores: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            try:
                term, pol_str = line.split("\t", 1)
                pol = float(pol_str)
            except ValueError:
                raise DataError(f"{path}:{lineno}: expected 'term<TAB>polarity'") from None
            term = normalize_term(term)
            if not term:
                raise DataError(f"{path}:{lineno}: term normalizes to empty")
            if not -1.0 <= pol <= 1.0:
                raise DataError(f"{path}:{lineno}: polarity {pol} out of [-1,1]")
            scores[term] = pol
    return SentimentLexicon(scores)


def parse_span_literal(s: str) -> CharIndexSet:
    """Parse a bracketed comma-separated integer list like ``[3, 4, 5]``.

    Whitespace-tolerant; duplicates collapse.  Malformed input raises
    DataError with the offending column, a negative index raises
    ValidationError.
    """
    i = 0
    n = len(s)
    while i < n and s[i].isspace():
        i += 1
    if i >= n or s[i] != "[":
        raise DataError(f"span literal: expected '[' at column {i}")
    i += 1
    indices: list[int] = []
    expect_value = True
    while True:
        while i < n and s[i].isspace():
            i += 1
        if i >= n:
            raise DataError(f"span literal: unterminated list at column {i}")
        if s[i] == "]":
            if not expect_value or not indices:
                i += 1
                break
            raise DataError(f"span literal: dangling comma at column {i}")
        if not expect_value:
            if s[i] != ",":
                raise DataError(f"span literal: expected ',' or ']' at column {i}")
            i += 1
            expect_value = True
            continue
        j = i
        if s[j] == "-":
            j += 1
        while j < n and s[j].isdigit():
            j += 1
        if j == i or (s[i] == "-" and j == i + 1):
            raise DataError(f"span literal: expected integer at column {i}")
        value = int(s[i:j])
        if value < 0:
            raise ValidationError(f"negative character index {value} at column {i}")
        indices.append(value)
        i = j
        expect_value = False
    while i < n:
        if not s[i].isspace():
            raise DataError(f"span literal: trailing content at column {i}")
        i += 1
    return CharIndexSet(indices)


@dataclass(slots=True)
class SpanLoadResult:
    """Posts plus bookkeeping about what the loader had to repair."""

    posts: list[AnnotatedPost] = field(default_factory=list)
    n_rows: int = 0
    n_skipped_rows: int = 0
    n_dropped_indices: int = 0


def load_toxic_spans(path, limit: int | None = None) -> SpanLoadResult:
    """Load the span-annotated CSV (columns ``spans`` and ``text``).

    Gold indices beyond the end of the text are dropped and counted rather
    than treated as fatal; the dataset is known to contain such rows.
    Unparseable rows are skipped and counted.  Row order gives the post id.
    """
    result = SpanLoadResult()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"spans", "text"} <= set(reader.fieldnames):
            raise DataError(f"{path}: need columns 'spans' and 'text', got {reader.fieldnames}")
        for row_idx, row in enumerate(reader):
            if limit is not None and len(result.posts) >= limit:
                break
            result.n_rows += 1
            text = row.get("text")
            raw_spans = row.get("spans")
            if text is None or raw_spans is None:
                result.n_skipped_rows += 1
                continue
            try:
                gold = parse_span_literal(raw_spans)
            except (DataError, ValidationError) as exc:
                logger.warning("row %d skipped: %s", row_idx, exc)
                result.n_skipped_rows += 1
                continue
            in_bounds = [i for i in gold if i < len(text)]
            dropped = len(gold) - len(in_bounds)
            if dropped:
                result.n_dropped_indices += dropped
                gold = CharIndexSet(in_bounds)
            result.posts.append(AnnotatedPost(str(row_idx), text, gold))
    logger.info(
        "%s: %d rows, %d posts, %d rows skipped, %d gold indices dropped",
        path, result.n_rows, len(result.posts),
        result.n_skipped_rows, result.n_dropped_indices,
    )
    return result


@dataclass(slots=True)
class SentenceLoadResult:
    posts: list[SentencePost] = field(default_factory=list)
    n_rows: int = 0
    n_rejected: int = 0


def load_sentence_dataset(
    path,
    threshold: float = 0.5,
    id_col: str = "id",
    text_col: str = "comment_text",
    score_col: str = "target",
    limit: int | None = None,
) -> SentenceLoadResult:
    """Load sentence-level toxicity scores; hateful = score strictly above
    the threshold.  Rows with scores outside [0, 1] are rejected and counted.
    """
    result = SentenceLoadResult()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        need = {id_col, text_col, score_col}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise DataError(f"{path}: need columns {sorted(need)}, got {reader.fieldnames}")
        for row in reader:
            if limit is not None and len(result.posts) >= limit:
                break
            result.n_rows += 1
            try:
                score = float(row[score_col])
            except (TypeError, ValueError):
                result.n_rejected += 1
                continue
            if not 0.0 <= score <= 1.0:
                result.n_rejected += 1
                continue
            result.posts.append(
                SentencePost(str(row[id_col]), row[text_col], score, score > threshold)
            )
    return result


def balanced_sample(
    posts: list[SentencePost], n_total: int, seed: int
) -> list[SentencePost]:
    """Seeded uniform sample without replacement, exactly n_total/2 per class."""
    if n_total % 2 != 0:
        raise ValidationError(f"n_total must be even, got {n_total}")
    half = n_total // 2
    hateful = [p for p in posts if p.hateful]
    clean = [p for p in posts if not p.hateful]
    if len(hateful) < half:
        raise DataError(f"insufficient hateful posts: need {half}, have {len(hateful)}")
    if len(clean) < half:
        raise DataError(f"insufficient non-hateful posts: need {half}, have {len(clean)}")
    rng = np.random.default_rng(seed)
    pick_h = rng.choice(len(hateful), size=half, replace=False)
    pick_c = rng.choice(len(clean), size=half, replace=False)
    sample = [hateful[i] for i in sorted(pick_h)] + [clean[i] for i in sorted(pick_c)]
    order = rng.permutation(n_total)
    return [sample[i] for i in order]


def data_path(name: str) -> Path:
    """Path of a bundled data file (lexicons, stopwords, sample corpus)."""
    return Path(__file__).parent / "data" / name
