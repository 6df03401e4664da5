"""Combine the character-index outputs of several models.

Two schemes: strict-majority voting over indices, and plain intersection.
Inputs are prediction files keyed by post id; every model must cover the
same posts.
"""

from __future__ import annotations

from collections import Counter
from typing import Mapping, Sequence

from .errors import ValidationError
from .spans import CharIndexSet


def vote(sets: Sequence[CharIndexSet]) -> CharIndexSet:
    """Indices predicted by strictly more than half of the models."""
    if len(sets) < 2:
        raise ValidationError(f"need at least 2 model outputs, got {len(sets)}")
    need = len(sets) // 2 + 1
    counts: Counter[int] = Counter()
    for s in sets:
        counts.update(s.as_frozenset())
    return CharIndexSet._wrap(frozenset(i for i, c in counts.items() if c >= need))


def intersect(sets: Sequence[CharIndexSet]) -> CharIndexSet:
    """Indices predicted by every model."""
    if len(sets) < 2:
        raise ValidationError(f"need at least 2 model outputs, got {len(sets)}")
    out = sets[0].as_frozenset()
    for s in sets[1:]:
        out = out & s.as_frozenset()
    return CharIndexSet._wrap(out)


def combine_predictions(
    model_outputs: Sequence[Mapping[str, CharIndexSet]], mode: str
) -> dict[str, CharIndexSet]:
    """Apply vote/intersect per post id across aligned prediction maps."""
    if mode not in ("vote", "intersect"):
        raise ValidationError(f"unknown ensemble mode {mode!r}")
    if len(model_outputs) < 2:
        raise ValidationError("need at least 2 prediction files")
    universe = set(model_outputs[0])
    for k, preds in enumerate(model_outputs[1:], start=2):
        if set(preds) != universe:
            missing = sorted(universe ^ set(preds))[:10]
            raise ValidationError(
                f"prediction file #{k} covers different post ids "
                f"(first differences: {missing})"
            )
    combine = vote if mode == "vote" else intersect
    return {pid: combine([m[pid] for m in model_outputs]) for pid in sorted(universe)}
