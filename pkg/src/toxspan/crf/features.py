"""Hand-crafted sparse features for the CRF emission layer.

Feature strings are hashed into a fixed space with crc32 (stable across
processes, unlike the builtin hash).  Collisions are tolerated; values are
implicitly 1.0.  Optional dense vectors from the encoder interchange file
ride alongside without touching the hash space.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..baselines import hate_hits
from ..corpus import Lexicon, SentimentLexicon
from ..errors import ValidationError
from ..spans import Label
from ..tokenizer import Token

PAD_FEATURE = "pad"


@dataclass(frozen=True, slots=True)
class FeatureVector:
    """Sparse hashed ids (each worth 1.0) plus an optional dense block."""

    ids: np.ndarray
    dense: np.ndarray | None = None


@dataclass(frozen=True)
class FeatureConfig:
    hash_bits: int = 20
    window: int = 2

    def __post_init__(self) -> None:
        if not 4 <= self.hash_bits <= 30:
            raise ValidationError(f"hash_bits {self.hash_bits} out of range [4, 30]")
        if self.window < 0:
            raise ValidationError("window must be non-negative")

    @property
    def hash_space(self) -> int:
        return 1 << self.hash_bits


class FeatureExtractor:
    """Turns token sequences into per-token FeatureVectors.

    Lexicons are optional: without them the is_hate / polarity features are
    simply never emitted.
    """

    def __init__(
        self,
        config: FeatureConfig | None = None,
        hate_lexicon: Lexicon | None = None,
        sentiment: SentimentLexicon | None = None,
    ) -> None:
        self.config = config or FeatureConfig()
        self.hate_lexicon = hate_lexicon
        self.sentiment = sentiment
        self._mask = self.config.hash_space - 1
        self._pad_ids = np.array([self._hash(PAD_FEATURE)], dtype=np.int64)

    def _hash(self, s: str) -> int:
        return zlib.crc32(s.encode("utf-8")) & self._mask

    def pad_vector(self) -> FeatureVector:
        return FeatureVector(self._pad_ids)

    def featurize(
        self,
        tokens: Sequence[Token],
        dense: Sequence[np.ndarray] | None = None,
    ) -> list[FeatureVector]:
        if dense is not None and len(dense) != len(tokens):
            raise ValidationError(
                f"{len(dense)} dense vectors for {len(tokens)} tokens"
            )
        hates = (
            hate_hits(tokens, self.hate_lexicon)
            if self.hate_lexicon is not None
            else [False] * len(tokens)
        )
        w = self.config.window
        out: list[FeatureVector] = []
        for t, tok in enumerate(tokens):
            feats = [f"w[0]={tok.norm}"]
            for k in range(1, min(3, len(tok.norm)) + 1):
                feats.append(f"pre{k}={tok.norm[:k]}")
                feats.append(f"suf{k}={tok.norm[-k:]}")
            if hates[t]:
                feats.append("is_hate")
            if self.sentiment is not None:
                pol = self.sentiment.polarity(tok.norm)
                feats.append("pol=" + ("neg" if pol < 0 else "pos" if pol > 0 else "zero"))
            if any(c.isdigit() for c in tok.surface):
                feats.append("has_digit")
            if any(not c.isalnum() for c in tok.surface):
                feats.append("has_symbol")
            for d in range(1, w + 1):
                if t - d >= 0:
                    feats.append(f"w[-{d}]={tokens[t - d].norm}")
                if t + d < len(tokens):
                    feats.append(f"w[+{d}]={tokens[t + d].norm}")
            if t == 0:
                feats.append("bos")
            if t == len(tokens) - 1:
                feats.append("eos")
            ids = np.unique(np.fromiter(
                (self._hash(f) for f in feats), dtype=np.int64, count=len(feats)
            ))
            out.append(FeatureVector(ids, None if dense is None else np.asarray(dense[t], dtype=np.float64)))
        return out


@dataclass(slots=True)
class EncodedSequence:
    """One training/decoding unit: features plus gold labels (no padding)."""

    features: list[FeatureVector]
    labels: np.ndarray  # int64, values from Label
    post_id: str = ""

    def __post_init__(self) -> None:
        if len(self.features) != len(self.labels):
            raise ValidationError("feature/label length mismatch")
        if len(self.features) == 0:
            raise ValidationError("empty sequence")


def pad_sequence(
    seq: EncodedSequence, length: int, extractor: FeatureExtractor
) -> EncodedSequence:
    """Extend to ``length`` with PAD features and PAD gold labels."""
    n = len(seq.labels)
    if length < n:
        raise ValidationError("pad length shorter than sequence")
    if length == n:
        return seq
    pad_vec = extractor.pad_vector()
    dense_dim = None
    if seq.features and seq.features[0].dense is not None:
        dense_dim = seq.features[0].dense.shape[0]
    if dense_dim is not None:
        pad_vec = FeatureVector(pad_vec.ids, np.zeros(dense_dim))
    features = list(seq.features) + [pad_vec] * (length - n)
    labels = np.concatenate(
        [seq.labels, np.full(length - n, int(Label.PAD), dtype=np.int64)]
    )
    return EncodedSequence(features, labels, seq.post_id)
