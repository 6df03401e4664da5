"""Rule-based span selection over per-word attention scores.

Pipeline per post: a sentence-level gate (hate probability must clear a
threshold, otherwise the prediction is empty), then a percentile-plus-
threshold cut on attention, then one of three successive rule sets:

  R1  drop stop-words from the cut
  R2  R1, then drop positive-sentiment words
  R3  R2, then add every hate-lexicon word regardless of attention
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import ValidationError
from ..spans import CharIndexSet, Label, corpus_f1, token_labels_to_index_set
from .interchange import ScoredPost, WordScore

RULES = ("R1", "R2", "R3")

# Grid defaults bracket the operating point reported for this pipeline
# (top 75% of attention scores, minimum attention 1e-4).
DEFAULT_THRESHOLDS = (0.0, 1e-5, 1e-4, 1e-3, 1e-2)
DEFAULT_PERCENTILES = (0.10, 0.25, 0.50, 0.75, 0.90, 1.0)


@dataclass(frozen=True)
class RuleConfig:
    percentile: float = 0.75
    threshold: float = 1e-4
    rule: str = "R1"
    gate: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.percentile <= 1.0:
            raise ValidationError(f"percentile {self.percentile} out of (0, 1]")
        if self.threshold < 0:
            raise ValidationError(f"threshold {self.threshold} must be >= 0")
        if self.rule not in RULES:
            raise ValidationError(f"rule must be one of {RULES}, got {self.rule!r}")
        if not 0.0 <= self.gate <= 1.0:
            raise ValidationError(f"gate {self.gate} out of [0, 1]")


def pool_subwords(
    groups: Sequence[tuple], **word_kwargs
) -> list[WordScore]:
    """Mean-pool subword attention values into per-word scores.

    Each group is (token, subword scores); a word split into several
    subwords gets the arithmetic mean of their values.
    """
    out = []
    for token, scores in groups:
        if len(scores) == 0:
            raise ValidationError(f"word {token.surface!r} has no subword scores")
        out.append(WordScore(token, float(sum(scores)) / len(scores), **word_kwargs))
    return out


def gate(post: ScoredPost, tau: float) -> bool:
    """True means proceed to span selection; false means predict empty."""
    return post.sent_prob > tau


def select_rule(words: Sequence[WordScore], p: float, theta: float) -> set[int]:
    """Top ceil(p*n) words by attention (ties to the earlier word), then
    drop any kept word whose attention falls below theta."""
    if not 0.0 < p <= 1.0:
        raise ValidationError(f"percentile {p} out of (0, 1]")
    if theta < 0:
        raise ValidationError(f"threshold {theta} must be >= 0")
    n = len(words)
    if n == 0:
        return set()
    order = sorted(range(n), key=lambda i: (-words[i].attn, i))
    kept = order[: math.ceil(p * n)]
    return {i for i in kept if words[i].attn >= theta}


def apply_rule_set(
    words: Sequence[WordScore],
    selection: set[int],
    rule: str,
    stopwords: frozenset[str] | set[str] = frozenset(),
) -> set[int]:
    if rule not in RULES:
        raise ValidationError(f"rule must be one of {RULES}, got {rule!r}")
    out = {i for i in selection if words[i].token.norm not in stopwords}
    if rule == "R1":
        return out
    out = {i for i in out if words[i].polarity <= 0}
    if rule == "R2":
        return out
    return out | {i for i in range(len(words)) if words[i].is_hate}


def predict_post(
    post: ScoredPost,
    config: RuleConfig,
    stopwords: frozenset[str] | set[str] = frozenset(),
    gate_override: bool | None = None,
) -> CharIndexSet:
    """Full per-post pipeline: gate, attention cut, rule set, span build.

    gate_override replaces the sentence-probability gate; used for the
    known-sentence-label upper-bound experiment.
    """
    proceed = gate_override if gate_override is not None else gate(post, config.gate)
    if not proceed:
        return CharIndexSet()
    selection = select_rule(post.words, config.percentile, config.threshold)
    selection = apply_rule_set(post.words, selection, config.rule, stopwords)
    tokens = [w.token for w in post.words]
    labels = [
        Label.TOXIC if i in selection else Label.NONTOXIC for i in range(len(tokens))
    ]
    return token_labels_to_index_set(tokens, labels)


@dataclass(frozen=True)
class GridCell:
    percentile: float
    threshold: float
    f1: float


@dataclass(frozen=True)
class GridSearchResult:
    percentile: float
    threshold: float
    f1: float
    cells: tuple[GridCell, ...]


def grid_search(
    dev: Sequence[tuple[ScoredPost, CharIndexSet]],
    thresholds: Iterable[float] = DEFAULT_THRESHOLDS,
    percentiles: Iterable[float] = DEFAULT_PERCENTILES,
    rule: str = "R1",
    stopwords: frozenset[str] | set[str] = frozenset(),
    tau: float = 0.5,
) -> GridSearchResult:
    """Exhaustive corpus-F1 evaluation over the threshold/percentile grid.

    Ties break to the smaller percentile, then the larger threshold; the
    iteration order below makes that the first strict improvement.
    """
    thresholds = sorted(set(thresholds), reverse=True)
    percentiles = sorted(set(percentiles))
    if not thresholds or not percentiles:
        raise ValidationError("empty grid")
    if not dev:
        raise ValidationError("empty dev set")
    cells = []
    best: GridCell | None = None
    for p in percentiles:
        for theta in thresholds:
            config = RuleConfig(percentile=p, threshold=theta, rule=rule, gate=tau)
            f1 = corpus_f1(
                (predict_post(post, config, stopwords), gold) for post, gold in dev
            )
            cell = GridCell(p, theta, f1)
            cells.append(cell)
            if best is None or f1 > best.f1:
                best = cell
    return GridSearchResult(best.percentile, best.threshold, best.f1, tuple(cells))
