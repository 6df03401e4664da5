"""Seeded k-fold cross-validation over any tagger in the toolkit, plus
report generation (machine-readable JSON next to an aligned text table).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import baselines
from .attn import interchange as attn_io
from .attn import select as attn_select
from .attn import tree as attn_tree
from .corpus import AnnotatedPost, Lexicon, SentimentLexicon, load_lexicon, load_sentiment_lexicon, data_path
from .crf import (
    EncodedSequence,
    FeatureExtractor,
    ModelConfig,
    TrainConfig,
    params_from_config,
    predict_tokens,
    train,
)
from .errors import DataError, ValidationError
from .spans import CharIndexSet, Label, corpus_f1, project_gold_to_tokens, token_labels_to_index_set
from .tokenizer import tokenize

Predictor = Callable[[AnnotatedPost], CharIndexSet]

METHODS = (
    "empty", "oracle", "random", "hate", "sentiment", "combined",
    "crf", "attn-rule", "tree",
)


def kfold_split(
    posts: Sequence[AnnotatedPost], k: int, seed: int
) -> list[list[AnnotatedPost]]:
    """Seeded shuffle, then contiguous partition; fold sizes differ by <= 1."""
    if k < 2:
        raise ValidationError(f"need k >= 2 folds, got {k}")
    if k > len(posts):
        raise ValidationError(f"k={k} exceeds {len(posts)} posts")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(posts))
    base, extra = divmod(len(posts), k)
    folds = []
    pos = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append([posts[j] for j in order[pos : pos + size]])
        pos += size
    return folds


@dataclass
class ToolkitResources:
    """Lexicons and auxiliary inputs shared by the predictor factories."""

    hate_lexicon: Lexicon
    sentiment: SentimentLexicon
    stopwords: frozenset[str]
    scored_posts: dict[str, attn_io.ScoredPost] = field(default_factory=dict)

    @classmethod
    def bundled(cls) -> "ToolkitResources":
        stop = frozenset(
            line.strip().lower()
            for line in open(data_path("stopwords.txt"), encoding="utf-8")
            if line.strip() and not line.startswith("#")
        )
        return cls(
            hate_lexicon=load_lexicon(data_path("hate_words.txt")),
            sentiment=load_sentiment_lexicon(data_path("sentiment.tsv")),
            stopwords=stop,
        )

    def scored(self, post: AnnotatedPost) -> attn_io.ScoredPost:
        try:
            return self.scored_posts[post.id]
        except KeyError:
            raise DataError(f"no interchange record for post id {post.id!r}") from None


def _labels_to_set(post: AnnotatedPost, labels: list[Label]) -> CharIndexSet:
    return token_labels_to_index_set(tokenize(post.text), labels)


def make_predictor(
    method: str,
    train_posts: Sequence[AnnotatedPost],
    resources: ToolkitResources,
    cfg: dict,
) -> Predictor:
    """Build a per-post predictor, training on train_posts when needed."""
    if method == "empty":
        return lambda post: CharIndexSet()
    if method == "oracle":
        return lambda post: post.gold
    if method == "random":
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        p_toxic = float(cfg.get("p_toxic", 0.5))

        def predict_random(post: AnnotatedPost) -> CharIndexSet:
            tokens = tokenize(post.text)
            draws = rng.random(len(tokens))
            labels = [
                Label.TOXIC if d < p_toxic else Label.NONTOXIC for d in draws
            ]
            return token_labels_to_index_set(tokens, labels)

        return predict_random
    if method == "hate":
        return lambda post: _labels_to_set(
            post, baselines.hate_lexicon_tagger(tokenize(post.text), resources.hate_lexicon)
        )
    if method == "sentiment":
        return lambda post: _labels_to_set(
            post, baselines.sentiment_tagger(tokenize(post.text), resources.sentiment)
        )
    if method == "combined":
        return lambda post: _labels_to_set(
            post,
            baselines.combined_tagger(
                tokenize(post.text), resources.hate_lexicon, resources.sentiment
            ),
        )
    if method == "attn-rule":
        config = attn_select.RuleConfig(
            percentile=float(cfg.get("percentile", 0.75)),
            threshold=float(cfg.get("threshold", 1e-4)),
            rule=str(cfg.get("rule", "R1")),
            gate=float(cfg.get("gate", 0.5)),
        )
        return lambda post: attn_select.predict_post(
            resources.scored(post), config, resources.stopwords
        )
    if method == "tree":
        samples = []
        for post in train_posts:
            scored = resources.scored(post)
            tokens = [w.token for w in scored.words]
            labels = project_gold_to_tokens(post.gold, tokens)
            samples.extend(zip(scored.words, labels))
        tree = attn_tree.train_decision_tree(
            samples,
            max_depth=int(cfg.get("max_depth", 5)),
            min_leaf=int(cfg.get("min_leaf", 20)),
        )
        tau = float(cfg.get("gate", 0.5))

        def predict_with_tree(post: AnnotatedPost) -> CharIndexSet:
            scored = resources.scored(post)
            if not attn_select.gate(scored, tau):
                return CharIndexSet()
            labels = attn_tree.predict_tree(tree, scored.words)
            return token_labels_to_index_set([w.token for w in scored.words], labels)

        return predict_with_tree
    if method == "crf":
        return _make_crf_predictor(train_posts, resources, cfg)
    raise ValidationError(f"unknown method {method!r}; choose from {METHODS}")


def encode_posts(
    posts: Sequence[AnnotatedPost], extractor: FeatureExtractor
) -> list[EncodedSequence]:
    """Tokenize, featurize and project gold labels; empty posts are skipped."""
    out = []
    for post in posts:
        tokens = tokenize(post.text)
        if not tokens:
            continue
        labels = np.array(
            [int(lab) for lab in project_gold_to_tokens(post.gold, tokens)],
            dtype=np.int64,
        )
        out.append(EncodedSequence(extractor.featurize(tokens), labels, post.id))
    return out


def encode_posts_with_embeddings(
    posts: Sequence[AnnotatedPost],
    scored_by_id: dict[str, attn_io.ScoredPost],
    extractor: FeatureExtractor,
) -> list[EncodedSequence]:
    """Like encode_posts, but tokens and dense features come from the
    interchange records (word spans + exported embeddings)."""
    out = []
    for post in posts:
        scored = scored_by_id.get(post.id)
        if scored is None or not scored.words:
            continue
        if any(w.emb is None for w in scored.words):
            raise DataError(
                f"post {post.id}: interchange record has no embeddings "
                "(re-export with --emb)"
            )
        tokens = [w.token for w in scored.words]
        dense = [w.emb for w in scored.words]
        labels = np.array(
            [int(lab) for lab in project_gold_to_tokens(post.gold, tokens)],
            dtype=np.int64,
        )
        out.append(
            EncodedSequence(extractor.featurize(tokens, dense=dense), labels, post.id)
        )
    return out


def _make_crf_predictor(
    train_posts: Sequence[AnnotatedPost], resources: ToolkitResources, cfg: dict
) -> Predictor:
    model_config = ModelConfig(
        hash_bits=int(cfg.get("hash_bits", 18)),
        window=int(cfg.get("window", 2)),
        hidden_layers=int(cfg.get("hidden_layers", 0)),
        hidden_width=int(cfg.get("hidden_width", 16)),
    )
    extractor = FeatureExtractor(
        model_config.feature_config(), resources.hate_lexicon, resources.sentiment
    )
    train_config = TrainConfig(
        epochs=int(cfg.get("epochs", 10)),
        learning_rate=float(cfg.get("learning_rate", 1e-2)),
        l2=float(cfg.get("l2", 1e-4)),
        batch_size=int(cfg.get("batch_size", 32)),
        seed=int(cfg.get("seed", 0)),
        clip=float(cfg.get("clip", 5.0)),
        pad_batches=bool(cfg.get("pad_batches", True)),
    )
    sequences = encode_posts(train_posts, extractor)
    params = params_from_config(model_config, train_config.seed)
    result = train(sequences, params, train_config, extractor)

    def predict_crf(post: AnnotatedPost) -> CharIndexSet:
        tokens = tokenize(post.text)
        if not tokens:
            return CharIndexSet()
        return predict_tokens(result.params, extractor, tokens)

    return predict_crf


@dataclass
class MethodResult:
    method: str
    params: dict
    fold_train_f1: list[float]
    fold_test_f1: list[float]

    @property
    def mean_train_f1(self) -> float:
        return sum(self.fold_train_f1) / len(self.fold_train_f1)

    @property
    def mean_test_f1(self) -> float:
        return sum(self.fold_test_f1) / len(self.fold_test_f1)


@dataclass
class Report:
    seed: int
    folds: int
    n_posts: int
    config_hash: str
    methods: list[MethodResult]


def config_digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def run_crossval(
    method: str,
    posts: Sequence[AnnotatedPost],
    resources: ToolkitResources,
    k: int = 5,
    seed: int = 0,
    cfg: dict | None = None,
) -> MethodResult:
    """Train on k-1 folds, score the held-out fold; repeat for every fold."""
    cfg = dict(cfg or {})
    cfg.setdefault("seed", seed)
    folds = kfold_split(posts, k, seed)
    train_scores, test_scores = [], []
    for i, held_out in enumerate(folds):
        train_posts = [p for j, fold in enumerate(folds) if j != i for p in fold]
        try:
            predictor = make_predictor(method, train_posts, resources, cfg)
            train_scores.append(
                corpus_f1((predictor(p), p.gold) for p in train_posts)
            )
            test_scores.append(corpus_f1((predictor(p), p.gold) for p in held_out))
        except Exception as exc:
            raise type(exc)(f"fold {i}: {exc}") from exc
    return MethodResult(method, cfg, train_scores, test_scores)


def build_report(
    results: Sequence[MethodResult], n_posts: int, k: int, seed: int
) -> Report:
    payload = {
        "seed": seed,
        "folds": k,
        "methods": [{"method": r.method, "params": r.params} for r in results],
    }
    return Report(seed, k, n_posts, config_digest(payload), list(results))


def write_report(report: Report, path) -> tuple[Path, Path]:
    """JSON at ``path``; aligned table (3-decimal F1) at ``path + .txt``."""
    path = Path(path)
    obj = {
        "format": "toxspan-report",
        "version": 1,
        "seed": report.seed,
        "folds": report.folds,
        "n_posts": report.n_posts,
        "config_hash": report.config_hash,
        "methods": [
            {
                "method": r.method,
                "params": r.params,
                "fold_train_f1": r.fold_train_f1,
                "fold_test_f1": r.fold_test_f1,
                "mean_train_f1": r.mean_train_f1,
                "mean_test_f1": r.mean_test_f1,
            }
            for r in report.methods
        ],
    }
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")

    lines = [
        f"toxspan cross-validation report "
        f"(seed={report.seed}, folds={report.folds}, posts={report.n_posts}, "
        f"config={report.config_hash})",
        "",
        f"{'method':<12} {'F1 (train)':>10} {'F1 (test)':>10}  per-fold test F1",
    ]
    for r in report.methods:
        per_fold = " ".join(f"{x:.3f}" for x in r.fold_test_f1)
        lines.append(
            f"{r.method:<12} {r.mean_train_f1:>10.3f} {r.mean_test_f1:>10.3f}  {per_fold}"
        )
    table_path = Path(str(path) + ".txt")
    table_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path, table_path


def read_report(path) -> Report:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: bad report file ({exc})") from None
    if obj.get("format") != "toxspan-report":
        raise DataError(f"{path}: not a toxspan report")
    methods = [
        MethodResult(
            m["method"], m["params"], m["fold_train_f1"], m["fold_test_f1"]
        )
        for m in obj["methods"]
    ]
    return Report(obj["seed"], obj["folds"], obj["n_posts"], obj["config_hash"], methods)
