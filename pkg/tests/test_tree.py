import numpy as np
import pytest

from toxspan.attn.tree import DecisionTree, predict_tree, train_decision_tree
from toxspan.attn.interchange import WordScore
from toxspan.errors import DataError, ValidationError
from toxspan.spans import Label
from toxspan.tokenizer import Token


def word(attn=0.0, pos="NOUN", polarity=0.0, is_hate=False):
    return WordScore(Token.make("w", 0, 1), attn, pos=pos, polarity=polarity, is_hate=is_hate)


def accuracy(tree, samples):
    preds = predict_tree(tree, [w for w, _ in samples])
    return sum(p == lab for p, (_, lab) in zip(preds, samples)) / len(samples)


def test_single_class_single_leaf():
    samples = [(word(attn=float(a)), Label.NONTOXIC) for a in range(10)]
    tree = train_decision_tree(samples, min_leaf=1)
    assert tree.root.is_leaf
    assert tree.root.label == Label.NONTOXIC


def test_linearly_separable_attn_depth_one():
    rng = np.random.default_rng(0)
    samples = []
    for _ in range(50):
        a = float(rng.uniform(0.6, 1.0))
        samples.append((word(attn=a), Label.TOXIC))
        samples.append((word(attn=a - 0.5), Label.NONTOXIC))
    tree = train_decision_tree(samples, max_depth=5, min_leaf=1)
    assert tree.depth() == 1
    assert accuracy(tree, samples) == 1.0
    assert tree.root.feature == "attn"


def test_xor_solved_at_depth_two():
    samples = []
    for a in (0.0, 1.0):
        for h in (False, True):
            lab = Label.TOXIC if (a > 0.5) != h else Label.NONTOXIC
            samples.extend([(word(attn=a, is_hate=h), lab)] * 5)
    tree = train_decision_tree(samples, max_depth=2, min_leaf=1)
    assert accuracy(tree, samples) == 1.0


def test_categorical_pos_one_vs_rest():
    samples = []
    for pos in ("NOUN", "VERB", "ADJ"):
        lab = Label.TOXIC if pos == "ADJ" else Label.NONTOXIC
        samples.extend([(word(pos=pos), lab)] * 10)
    tree = train_decision_tree(samples, max_depth=3, min_leaf=1)
    assert accuracy(tree, samples) == 1.0
    assert tree.root.category is not None


def test_min_leaf_blocks_tiny_splits():
    samples = [(word(attn=1.0), Label.TOXIC)] + [
        (word(attn=0.0), Label.NONTOXIC)
    ] * 30
    tree = train_decision_tree(samples, max_depth=5, min_leaf=5)
    assert tree.root.is_leaf  # the lone TOXIC sample cannot form a leaf
    assert tree.root.label == Label.NONTOXIC


def test_deterministic():
    rng = np.random.default_rng(5)
    samples = [
        (
            word(
                attn=float(rng.random()),
                polarity=float(rng.uniform(-1, 1)),
                is_hate=bool(rng.integers(2)),
                pos=("NOUN", "VERB")[int(rng.integers(2))],
            ),
            Label.TOXIC if rng.random() < 0.4 else Label.NONTOXIC,
        )
        for _ in range(200)
    ]
    t1 = train_decision_tree(samples, max_depth=4, min_leaf=3)
    t2 = train_decision_tree(samples, max_depth=4, min_leaf=3)
    assert t1.to_json() == t2.to_json()


def test_json_round_trip_preserves_predictions():
    rng = np.random.default_rng(6)
    samples = [
        (word(attn=float(rng.random()), is_hate=bool(rng.integers(2))),
         Label.TOXIC if rng.random() < 0.5 else Label.NONTOXIC)
        for _ in range(100)
    ]
    tree = train_decision_tree(samples, max_depth=4, min_leaf=2)
    clone = DecisionTree.from_json(tree.to_json())
    words = [w for w, _ in samples]
    assert predict_tree(tree, words) == predict_tree(clone, words)


def test_from_json_rejects_wrong_schema():
    tree = train_decision_tree([(word(), Label.NONTOXIC)], min_leaf=1)
    text = tree.to_json().replace('"attn"', '"zing"')
    with pytest.raises(DataError, match="schema"):
        DecisionTree.from_json(text)


def test_empty_samples_rejected():
    with pytest.raises(ValidationError):
        train_decision_tree([])


def test_pad_label_rejected():
    with pytest.raises(ValidationError):
        train_decision_tree([(word(), Label.PAD)])
