"""Character-span algebra and the per-post character-overlap F1 metric.

A prediction (and a gold annotation) is a set of character offsets into the
original post text.  Offsets are Unicode scalar positions, never bytes.
This module provides the set type, its run-length span view, conversions
between token labels and character index sets, and the Dice-style F1 used
to score predictions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ValidationError


class Label(enum.IntEnum):
    """Per-token tag. PAD marks padded positions only, never a real token."""

    TOXIC = 0
    NONTOXIC = 1
    PAD = 2


@dataclass(frozen=True, slots=True)
class CharSpan:
    """Half-open character interval [start, end) into the original text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end <= self.start:
            raise ValidationError(f"invalid span ({self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start


class CharIndexSet:
    """Set of non-negative character offsets into a post.

    Immutable. Iteration is always in increasing offset order, so any
    serialization of the same set is byte-identical.
    """

    __slots__ = ("_set",)

    def __init__(self, indices: Iterable[int] = ()) -> None:
        s = frozenset(indices)
        for i in s:
            if not isinstance(i, int) or isinstance(i, bool) or i < 0:
                raise ValidationError(f"invalid character index {i!r}")
        object.__setattr__(self, "_set", s)

    @classmethod
    def _wrap(cls, s: frozenset) -> "CharIndexSet":
        """Validation-free constructor for values derived from valid sets."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "_set", s)
        return obj

    @classmethod
    def from_spans(cls, spans: Iterable[CharSpan]) -> "CharIndexSet":
        """Union of all offsets covered by the spans (overlaps allowed)."""
        out: set[int] = set()
        for sp in spans:
            out.update(range(sp.start, sp.end))
        return cls(out)

    def as_frozenset(self) -> frozenset:
        return self._set

    def to_spans(self) -> list[CharSpan]:
        """Maximal runs of consecutive offsets, in increasing order."""
        spans: list[CharSpan] = []
        run_start = None
        prev = None
        for i in sorted(self._set):
            if run_start is None:
                run_start = prev = i
            elif i == prev + 1:
                prev = i
            else:
                spans.append(CharSpan(run_start, prev + 1))
                run_start = prev = i
        if run_start is not None:
            spans.append(CharSpan(run_start, prev + 1))
        return spans

    def serialize(self) -> str:
        """Bracketed comma-separated list, e.g. ``[3, 4, 5, 6]``."""
        return "[" + ", ".join(str(i) for i in sorted(self._set)) + "]"

    def intersection(self, other: "CharIndexSet") -> "CharIndexSet":
        return CharIndexSet._wrap(self._set & other._set)

    def union(self, other: "CharIndexSet") -> "CharIndexSet":
        return CharIndexSet._wrap(self._set | other._set)

    def issubset(self, other: "CharIndexSet") -> bool:
        return self._set <= other._set

    def max_index(self) -> int | None:
        return max(self._set) if self._set else None

    def __contains__(self, i: int) -> bool:
        return i in self._set

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._set))

    def __len__(self) -> int:
        return len(self._set)

    def __bool__(self) -> bool:
        return bool(self._set)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CharIndexSet):
            return NotImplemented
        return self._set == other._set

    def __hash__(self) -> int:
        return hash(self._set)

    def __repr__(self) -> str:
        return f"CharIndexSet({sorted(self._set)})"


def index_set_to_spans(s: CharIndexSet) -> list[CharSpan]:
    return s.to_spans()


def spans_to_index_set(spans: Iterable[CharSpan]) -> CharIndexSet:
    return CharIndexSet.from_spans(spans)


def project_gold_to_tokens(gold: CharIndexSet, tokens: Sequence) -> list[Label]:
    """Label each token TOXIC iff at least one of its offsets is in gold.

    Any-overlap on purpose: the dataset contains annotations that slice
    through the middle of words, and a majority rule would drop them.
    """
    labels = []
    for tok in tokens:
        hit = any(i in gold for i in range(tok.start, tok.end))
        labels.append(Label.TOXIC if hit else Label.NONTOXIC)
    return labels


def token_labels_to_index_set(tokens: Sequence, labels: Sequence[Label]) -> CharIndexSet:
    """Character offsets of TOXIC tokens, with gaps between consecutive
    TOXIC tokens filled in.

    Gold spans include the spaces inside multi-word spans (e.g. a span
    covering "man is he stupid"), so two TOXIC tokens adjacent in token
    order contribute every character strictly between them as well.
    """
    if len(tokens) != len(labels):
        raise ValidationError(
            f"{len(labels)} labels for {len(tokens)} tokens"
        )
    out: set[int] = set()
    prev_toxic_end = None
    for tok, lab in zip(tokens, labels):
        if lab == Label.PAD:
            raise ValidationError("PAD label reached span reconstruction")
        if lab == Label.TOXIC:
            if prev_toxic_end is not None:
                out.update(range(prev_toxic_end, tok.start))
            out.update(range(tok.start, tok.end))
            prev_toxic_end = tok.end
        else:
            prev_toxic_end = None
    return CharIndexSet(out)


def char_f1(pred: CharIndexSet, gold: CharIndexSet) -> float:
    """Dice overlap 2*|pred & gold| / (|pred| + |gold|) on one post.

    Both sets empty counts as a perfect 1.0; exactly one empty is 0.0.
    """
    if not pred and not gold:
        return 1.0
    if not pred or not gold:
        return 0.0
    inter = len(pred._set & gold._set)
    return 2.0 * inter / (len(pred) + len(gold))


def corpus_f1(pairs: Iterable[tuple[CharIndexSet, CharIndexSet]]) -> float:
    """Unweighted mean of per-post char_f1 over (pred, gold) pairs."""
    total = 0.0
    n = 0
    for pred, gold in pairs:
        total += char_f1(pred, gold)
        n += 1
    if n == 0:
        raise ValidationError("no posts")
    return total / n


def write_predictions(records: Iterable[tuple[str, CharIndexSet]], path) -> None:
    """One post per line: ``<id>\\t<bracketed index list>``."""
    with open(path, "w", encoding="utf-8") as fh:
        for post_id, pred in records:
            fh.write(f"{post_id}\t{pred.serialize()}\n")


def read_predictions(path) -> dict[str, CharIndexSet]:
    """Parse a prediction file written by write_predictions."""
    from .corpus import parse_span_literal

    out: dict[str, CharIndexSet] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                post_id, literal = line.split("\t", 1)
            except ValueError:
                raise ValidationError(
                    f"{path}:{lineno}: expected '<id>\\t<spans>'"
                ) from None
            out[post_id] = parse_span_literal(literal)
    return out
