import csv
import random

import pytest
import torch


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    """Small randomly initialized BERT-style classifier, built offline."""
    from transformers import BertConfig, BertForSequenceClassification, BertTokenizerFast

    path = tmp_path_factory.mktemp("ckpt")
    vocab = [
        "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
        "you", "are", "stu", "##pid", "idiot", "fool", "what",
        "man", "is", "he", "the", "and", "total", "##ly", "liar", "##s",
    ]
    vocab += list("abcdefghijklmnopqrstuvwxyz")
    vocab += ["##" + c for c in "abcdefghijklmnopqrstuvwxyz"]
    seen: set[str] = set()
    vocab = [v for v in vocab if not (v in seen or seen.add(v))]
    (path / "vocab.txt").write_text("\n".join(vocab) + "\n")
    tokenizer = BertTokenizerFast(str(path / "vocab.txt"), do_lower_case=True)
    tokenizer.save_pretrained(path)

    torch.manual_seed(20210705)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=16,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=64,
        num_labels=2,
    )
    BertForSequenceClassification(config).save_pretrained(path)
    return str(path)


WORDS = (
    "you are stupid idiot fool what man is he the and liars totally "
    "zork blimp a$$hole grumble quiet river stone".split()
)


def write_corpus(path, n_rows, seed=3):
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["spans", "text"])
        for i in range(n_rows):
            n = rng.randint(2, 14)
            words = [rng.choice(WORDS) for _ in range(n)]
            if i % 7 == 0:
                words.append("!")
            writer.writerow(["[]", " ".join(words)])
    return path


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    return str(write_corpus(tmp_path_factory.mktemp("data") / "small.csv", 6))


@pytest.fixture(scope="session")
def corpus_100(tmp_path_factory):
    return str(write_corpus(tmp_path_factory.mktemp("data") / "c100.csv", 100))
