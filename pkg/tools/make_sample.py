#!/usr/bin/env python3
"""Regenerate src/toxspan/data/sample_toxic_spans.csv.

Deterministic synthetic corpus in the shape of the span-annotated task
data: comment-like posts, ~12% with empty gold spans, a few multi-word
spans (with the inter-word spaces included in the gold indices), a few
deliberately broken annotations, some non-ASCII text, and two rows with
out-of-bounds indices to exercise the loader's bounds-dropping.
"""

from __future__ import annotations

import csv
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src/toxspan/data/sample_toxic_spans.csv"

TOXIC_WORDS = [
    "idiot", "idiots", "idiotic", "stupid", "moron", "morons", "loser",
    "losers", "pathetic", "clown", "clowns", "liar", "liars", "fool",
    "fools", "dumb", "dumbass", "jerk", "scum", "scumbag", "hypocrite",
    "coward", "trash", "garbage", "a$$hole", "pu55y", "imbecile",
    "nitwit", "buffoon", "thug", "thugs", "crook", "crooks", "troll",
]
TOXIC_PHRASES = [
    "man is he stupid", "what an idiot", "bunch of clowns",
    "complete and utter moron", "piece of garbage", "pack of liars",
]
OPENERS = [
    "honestly", "look", "listen", "wow", "seriously", "once again",
    "as usual", "of course", "typical", "unbelievable", "sure",
    "frankly", "well well", "here we go again", "oh please",
]
NEUTRAL = [
    "the council voted on the new budget yesterday",
    "i read the article twice before commenting",
    "this policy affects every family in the district",
    "the weather has been unusually warm this spring",
    "thanks for sharing the link to the report",
    "we should wait for the official numbers first",
    "my neighbour has lived here for thirty years",
    "the school board meets again next tuesday",
    "traffic on the bridge was terrible this morning",
    "both parties agreed to continue the talks",
    "the study was published in a peer reviewed journal",
    "volunteers cleaned up the park over the weekend",
    "el ayuntamiento aprobó el presupuesto añadido",
    "the café on rue saint-andré serves good coffee",
    "danke für den hinweis auf die quelle",
]
TARGETS = [
    "these politicians", "the mayor", "that columnist", "those developers",
    "the committee", "this administration", "these so called experts",
    "the entire board", "that reporter", "the owners", "these people",
    "half the commenters here", "the governor", "city hall",
]
VERDICTS = [
    "should be ashamed", "never read the report", "will say anything",
    "do not care about facts", "keep moving the goalposts",
    "have no plan at all", "ignored every warning", "just want attention",
    "cannot be trusted", "made this mess worse",
]


def build_post(rng: random.Random, kind: str) -> tuple[str, list[tuple[int, int]]]:
    """Return (text, gold spans as [start, end) pairs)."""
    parts: list[str] = []
    spans: list[tuple[int, int]] = []

    def append(piece: str, toxic: bool = False) -> None:
        if parts:
            parts.append(" ")
        start = sum(len(p) for p in parts)
        parts.append(piece)
        if toxic:
            spans.append((start, start + len(piece)))

    if rng.random() < 0.6:
        append(rng.choice(OPENERS))
    if kind == "clean":
        append(rng.choice(NEUTRAL))
        if rng.random() < 0.5:
            append(rng.choice(NEUTRAL))
        return "".join(parts), []

    append(rng.choice(TARGETS))
    if rng.random() < 0.7:
        append("are" if rng.random() < 0.5 else "sound like")
        append(rng.choice(TOXIC_WORDS), toxic=True)
    else:
        append(rng.choice(VERDICTS))
    if rng.random() < 0.45:
        append(rng.choice(NEUTRAL))
    if kind == "multi" or rng.random() < 0.25:
        append(rng.choice(TOXIC_PHRASES), toxic=True)
    if rng.random() < 0.3:
        append("and")
        append(rng.choice(TARGETS))
        append("are")
        append(rng.choice(TOXIC_WORDS), toxic=True)
    if not spans:
        append("what a")
        append(rng.choice(TOXIC_WORDS), toxic=True)
    if rng.random() < 0.25:
        punct = rng.choice(["!", "!!", "?", "..."])
        parts.append(punct)
    return "".join(parts), spans


def main() -> None:
    rng = random.Random(20210705)
    rows: list[tuple[str, str]] = []
    for i in range(200):
        if i % 8 == 7:  # ~12% with no annotated span
            kind = "clean"
        elif i % 9 == 4:
            kind = "multi"
        else:
            kind = "plain"
        text, spans = build_post(rng, kind)
        indices: list[int] = []
        for start, end in spans:
            indices.extend(range(start, end))
        if kind != "clean" and i % 23 == 1 and indices:
            # broken annotation: clipped on the left, bleeding right by 2
            lo, hi = indices[0], indices[-1]
            indices = list(range(lo + 3, min(hi + 3, len(text))))
        if i in (50, 140) and indices:
            # out-of-bounds noise the loader must drop
            indices.append(len(text) + 10)
        rows.append(("[" + ", ".join(map(str, sorted(set(indices)))) + "]", text))

    with open(OUT, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["spans", "text"])
        writer.writerows(rows)
    n_empty = sum(1 for spans, _ in rows if spans == "[]")
    print(f"wrote {len(rows)} rows ({n_empty} without spans) to {OUT}")


if __name__ == "__main__":
    main()
