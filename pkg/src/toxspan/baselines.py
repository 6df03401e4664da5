"""Random and keyword/sentiment baseline taggers.

Each tagger maps a token sequence to per-token labels; span reconstruction
(including gap filling) is left to spans.token_labels_to_index_set so all
taggers share the same output path.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .corpus import Lexicon, SentimentLexicon
from .spans import Label
from .tokenizer import Token


def hate_hits(tokens: Sequence[Token], lexicon: Lexicon) -> list[bool]:
    """Per-token flag: part of some lexicon match.

    Single-word entries match a token's normalized form exactly; multiword
    entries match runs of consecutive tokens whose normalized forms join
    (space-separated) to the entry, and flag every token in the run.
    """
    hits = [tok.norm in lexicon for tok in tokens]
    max_n = lexicon.max_words()
    for n in range(2, max_n + 1):
        for i in range(len(tokens) - n + 1):
            phrase = " ".join(tokens[j].norm for j in range(i, i + n))
            if phrase in lexicon:
                for j in range(i, i + n):
                    hits[j] = True
    return hits


def random_tagger(
    tokens: Sequence[Token], p_toxic: float = 0.5, seed: int = 0
) -> list[Label]:
    """Independently flip each token TOXIC with probability p_toxic."""
    rng = np.random.default_rng(seed)
    draws = rng.random(len(tokens))
    return [Label.TOXIC if d < p_toxic else Label.NONTOXIC for d in draws]


def hate_lexicon_tagger(tokens: Sequence[Token], lexicon: Lexicon) -> list[Label]:
    """TOXIC iff the token participates in a hate-lexicon match."""
    return [Label.TOXIC if hit else Label.NONTOXIC for hit in hate_hits(tokens, lexicon)]


def sentiment_tagger(
    tokens: Sequence[Token], sentiment: SentimentLexicon
) -> list[Label]:
    """TOXIC iff the token's polarity is strictly negative (unknown -> 0)."""
    return [
        Label.TOXIC if sentiment.polarity(tok.norm) < 0 else Label.NONTOXIC
        for tok in tokens
    ]


def combined_tagger(
    tokens: Sequence[Token], lexicon: Lexicon, sentiment: SentimentLexicon
) -> list[Label]:
    """Per-token union of the hate-lexicon and negative-sentiment taggers."""
    hate = hate_lexicon_tagger(tokens, lexicon)
    neg = sentiment_tagger(tokens, sentiment)
    return [
        Label.TOXIC if Label.TOXIC in (a, b) else Label.NONTOXIC
        for a, b in zip(hate, neg)
    ]
