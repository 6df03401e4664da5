"""toxspan: detect which character spans of a comment make it toxic.

Subpackages cover the pipeline end to end: span algebra and the char-F1
metric (spans), corpus loading and normalization (corpus), keyword/random
baselines (baselines), attention-rule selection and a decision tree (attn),
a linear-chain CRF tagger (crf), output combination (ensemble), and the
cross-validation harness + CLI (harness, cli).
"""

from .spans import (
    CharIndexSet,
    CharSpan,
    Label,
    char_f1,
    corpus_f1,
    index_set_to_spans,
    project_gold_to_tokens,
    spans_to_index_set,
    token_labels_to_index_set,
)
from .tokenizer import Token, tokenize

__version__ = "0.1.0"

__all__ = [
    "CharIndexSet",
    "CharSpan",
    "Label",
    "char_f1",
    "corpus_f1",
    "index_set_to_spans",
    "project_gold_to_tokens",
    "spans_to_index_set",
    "token_labels_to_index_set",
    "Token",
    "tokenize",
    "__version__",
]
