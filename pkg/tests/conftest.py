import numpy as np
import pytest

from toxspan.attn.interchange import ScoredPost, WordScore
from toxspan.corpus import data_path, load_lexicon, load_sentiment_lexicon, load_toxic_spans
from toxspan.harness import ToolkitResources
from toxspan.tokenizer import tokenize


@pytest.fixture(scope="session")
def resources() -> ToolkitResources:
    return ToolkitResources.bundled()


@pytest.fixture(scope="session")
def sample_posts():
    return load_toxic_spans(data_path("sample_toxic_spans.csv")).posts


def make_scored_post(post_id: str, text: str, rng: np.random.Generator,
                     sent_prob: float | None = None) -> ScoredPost:
    """Synthetic per-word attention scores over the real tokenization."""
    tokens = tokenize(text)
    words = tuple(
        WordScore(tok, attn=float(rng.gamma(1.0, 0.1))) for tok in tokens
    )
    prob = float(rng.random()) if sent_prob is None else sent_prob
    return ScoredPost(post_id, text, words, prob)


@pytest.fixture(scope="session")
def scored_sample(sample_posts):
    """ScoredPosts aligned with the bundled sample; attention peaks on gold."""
    rng = np.random.default_rng(7)
    out = []
    for post in sample_posts:
        tokens = tokenize(post.text)
        words = []
        for tok in tokens:
            base = float(rng.gamma(1.0, 0.05))
            if any(i in post.gold for i in range(tok.start, tok.end)):
                base += float(rng.uniform(0.3, 0.6))
            words.append(WordScore(tok, attn=base))
        sent_prob = 0.9 if post.gold else 0.1
        # a little gate noise so both gate branches occur
        if rng.random() < 0.05:
            sent_prob = 1.0 - sent_prob
        out.append(ScoredPost(post.id, post.text, tuple(words), sent_prob))
    return out
