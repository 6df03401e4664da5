"""CART decision tree over per-word features (attn, pos, polarity, is_hate).

Greedy top-down Gini splits, axis-aligned: numeric features test
``x <= threshold`` (midpoints between the sorted distinct values),
the categorical POS feature tests one-vs-rest membership ``pos == tag``.
Deterministic: features and candidate splits are enumerated in a fixed
order and only a strictly better split replaces the incumbent.

A zero-gain split is still taken when the node is impure, which is what
lets a depth-2 tree solve XOR-shaped data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from ..errors import DataError, ValidationError
from ..spans import Label
from .interchange import WordScore

SCHEMA = ("attn", "pos", "polarity", "is_hate")

_NUMERIC = {"attn": lambda w: w.attn,
            "polarity": lambda w: w.polarity,
            "is_hate": lambda w: float(w.is_hate)}


@dataclass
class TreeNode:
    label: Label | None = None
    feature: str | None = None
    threshold: float | None = None  # numeric test: value <= threshold
    category: str | None = None     # categorical test: pos == category
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.label is not None


@dataclass
class DecisionTree:
    root: TreeNode
    max_depth: int
    min_leaf: int
    schema: tuple[str, ...] = SCHEMA

    def predict(self, word: WordScore) -> Label:
        if self.schema != SCHEMA:
            raise DataError(f"tree schema {self.schema} does not match {SCHEMA}")
        node = self.root
        while not node.is_leaf:
            if node.category is not None:
                go_left = word.pos == node.category
            else:
                go_left = _NUMERIC[node.feature](word) <= node.threshold
            node = node.left if go_left else node.right
        return node.label

    def depth(self) -> int:
        def walk(node: TreeNode) -> int:
            if node.is_leaf:
                return 0
            return 1 + max(walk(node.left), walk(node.right))

        return walk(self.root)

    def to_json(self) -> str:
        def encode(node: TreeNode) -> dict:
            if node.is_leaf:
                return {"label": node.label.name}
            out: dict = {"feature": node.feature}
            if node.category is not None:
                out["category"] = node.category
            else:
                out["threshold"] = node.threshold
            out["left"] = encode(node.left)
            out["right"] = encode(node.right)
            return out

        return json.dumps(
            {
                "format": "toxspan-tree",
                "schema": list(self.schema),
                "max_depth": self.max_depth,
                "min_leaf": self.min_leaf,
                "root": encode(self.root),
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "DecisionTree":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"bad tree file: {exc}") from None
        if obj.get("format") != "toxspan-tree":
            raise DataError("not a toxspan decision tree file")
        schema = tuple(obj.get("schema", ()))
        if schema != SCHEMA:
            raise DataError(f"tree schema {schema} does not match {SCHEMA}")

        def decode(node: dict) -> TreeNode:
            if "label" in node:
                return TreeNode(label=Label[node["label"]])
            return TreeNode(
                feature=node["feature"],
                threshold=node.get("threshold"),
                category=node.get("category"),
                left=decode(node["left"]),
                right=decode(node["right"]),
            )

        return cls(decode(obj["root"]), obj["max_depth"], obj["min_leaf"], schema)


def _gini(counts: dict[Label, int], total: int) -> float:
    return 1.0 - sum((c / total) ** 2 for c in counts.values())


def _majority(labels: Sequence[Label]) -> Label:
    counts: dict[Label, int] = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    # ties go to the lower label index (TOXIC before NONTOXIC)
    return max(counts, key=lambda lab: (counts[lab], -int(lab)))


def _split_candidates(samples: Sequence[tuple[WordScore, Label]]):
    """Yield (feature, threshold, category, mask) in deterministic order."""
    for feature in SCHEMA:
        if feature == "pos":
            for tag in sorted({w.pos for w, _ in samples}):
                yield feature, None, tag, [w.pos == tag for w, _ in samples]
        else:
            get = _NUMERIC[feature]
            values = sorted({get(w) for w, _ in samples})
            for lo, hi in zip(values, values[1:]):
                mid = (lo + hi) / 2.0
                yield feature, mid, None, [get(w) <= mid for w, _ in samples]


def _grow(
    samples: list[tuple[WordScore, Label]], depth: int, max_depth: int, min_leaf: int
) -> TreeNode:
    labels = [lab for _, lab in samples]
    if depth >= max_depth or len(set(labels)) == 1:
        return TreeNode(label=_majority(labels))

    total = len(samples)
    best = None  # (impurity, feature, threshold, category, mask)
    for feature, threshold, category, mask in _split_candidates(samples):
        n_left = sum(mask)
        n_right = total - n_left
        if n_left < min_leaf or n_right < min_leaf:
            continue
        left_counts: dict[Label, int] = {}
        right_counts: dict[Label, int] = {}
        for went_left, lab in zip(mask, labels):
            side = left_counts if went_left else right_counts
            side[lab] = side.get(lab, 0) + 1
        impurity = (
            n_left * _gini(left_counts, n_left)
            + n_right * _gini(right_counts, n_right)
        ) / total
        if best is None or impurity < best[0]:
            best = (impurity, feature, threshold, category, mask)

    if best is None:
        return TreeNode(label=_majority(labels))
    _, feature, threshold, category, mask = best
    left = [s for s, went_left in zip(samples, mask) if went_left]
    right = [s for s, went_left in zip(samples, mask) if not went_left]
    return TreeNode(
        feature=feature,
        threshold=threshold,
        category=category,
        left=_grow(left, depth + 1, max_depth, min_leaf),
        right=_grow(right, depth + 1, max_depth, min_leaf),
    )


def train_decision_tree(
    samples: Sequence[tuple[WordScore, Label]],
    max_depth: int = 5,
    min_leaf: int = 20,
) -> DecisionTree:
    if not samples:
        raise ValidationError("no training samples")
    if max_depth < 1:
        raise ValidationError("max_depth must be >= 1")
    if min_leaf < 1:
        raise ValidationError("min_leaf must be >= 1")
    for _, lab in samples:
        if lab == Label.PAD:
            raise ValidationError("PAD is not a valid tree training label")
    root = _grow(list(samples), 0, max_depth, min_leaf)
    return DecisionTree(root, max_depth, min_leaf)


def predict_tree(tree: DecisionTree, words: Sequence[WordScore]) -> list[Label]:
    return [tree.predict(w) for w in words]
