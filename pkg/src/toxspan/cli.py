"""Command-line entry point.

One binary, one subcommand per pipeline stage.  Flag precedence is
CLI > config file (INI, one section per module) > built-in defaults.
Exit codes: 0 success, 2 validation error, 3 data error, 4 numerical
failure.  TOXSPAN_SEED sets the default seed; --seed overrides.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys


from . import baselines, ensemble, harness
from .attn import interchange as attn_io
from .attn import select as attn_select
from .attn import tree as attn_tree
from .corpus import (
    data_path,
    load_lexicon,
    load_sentiment_lexicon,
    load_toxic_spans,
)
from .crf import (
    FeatureExtractor,
    ModelConfig,
    TrainConfig,
    load_model,
    params_from_config,
    predict_tokens,
    save_model,
    train,
)
from .errors import DataError, NumericalError, ValidationError
from .spans import (
    CharIndexSet,
    corpus_f1,
    read_predictions,
    write_predictions,
)
from .tokenizer import tokenize

log = logging.getLogger("toxspan")

EXIT_VALIDATION = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


class Config:
    """Flat INI config; section per module, CLI flags win over file values."""

    def __init__(self, path: str | None) -> None:
        self._parser = configparser.ConfigParser()
        if path:
            read = self._parser.read(path)
            if not read:
                raise DataError(f"config file {path} not found")

    def get(self, section: str, key: str, fallback=None):
        return self._parser.get(section, key, fallback=fallback)


def _default_seed() -> int:
    env = os.environ.get("TOXSPAN_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ValidationError(f"TOXSPAN_SEED must be an integer, got {env!r}") from None


def _resolve(cli_value, config: Config, section: str, key: str, default, cast=str):
    if cli_value is not None:
        return cli_value
    raw = config.get(section, key)
    if raw is not None:
        try:
            return cast(raw)
        except ValueError:
            raise ValidationError(f"config [{section}] {key}={raw!r}: bad value") from None
    return default


def _load_resources(args, config: Config) -> harness.ToolkitResources:
    hate_path = _resolve(getattr(args, "hate_lexicon", None), config,
                         "corpus", "hate_lexicon", data_path("hate_words.txt"))
    senti_path = _resolve(getattr(args, "sentiment_lexicon", None), config,
                          "corpus", "sentiment_lexicon", data_path("sentiment.tsv"))
    stop_path = _resolve(getattr(args, "stopwords", None), config,
                         "attn", "stopwords", data_path("stopwords.txt"))
    stop = frozenset(
        line.strip().lower()
        for line in open(stop_path, encoding="utf-8")
        if line.strip() and not line.startswith("#")
    )
    return harness.ToolkitResources(
        hate_lexicon=load_lexicon(hate_path),
        sentiment=load_sentiment_lexicon(senti_path),
        stopwords=stop,
    )


def _load_gold(path, limit):
    result = load_toxic_spans(path, limit=limit)
    if not result.posts:
        raise DataError(f"{path}: no usable posts")
    return result


def _read_scored(path, resources):
    header, posts = attn_io.read_interchange(path)
    posts = attn_io.enrich(posts, resources.hate_lexicon, resources.sentiment)
    return header, posts


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_tokenize(args, config: Config) -> int:
    if args.text:
        for text in args.text:
            for tok in tokenize(text):
                print(f"{tok.start}\t{tok.end}\t{tok.surface}")
        return 0
    if not args.input:
        raise ValidationError("tokenize needs TEXT arguments or --input")
    result = _load_gold(args.input, args.limit)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for post in result.posts:
            tokens = [
                {"surface": t.surface, "start": t.start, "end": t.end, "norm": t.norm}
                for t in tokenize(post.text)
            ]
            out.write(json.dumps({"id": post.id, "tokens": tokens}) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_eval(args, config: Config) -> int:
    preds = read_predictions(args.pred)
    gold = _load_gold(args.gold, args.limit)
    pairs = []
    for post in gold.posts:
        if post.id not in preds:
            raise DataError(f"prediction file misses post id {post.id!r}")
        pairs.append((preds[post.id], post.gold))
    score = corpus_f1(pairs)
    print(f"posts: {len(pairs)}")
    print(f"corpus F1: {score:.3f}")
    return 0


def cmd_tag_baseline(args, config: Config) -> int:
    resources = _load_resources(args, config)
    gold = _load_gold(args.input, args.limit)
    seed = _resolve(args.seed, config, "baselines", "seed", _default_seed(), int)
    p_toxic = _resolve(args.p_toxic, config, "baselines", "p_toxic", 0.5, float)
    predictor = harness.make_predictor(
        args.method, gold.posts, resources, {"seed": seed, "p_toxic": p_toxic}
    )
    write_predictions(((p.id, predictor(p)) for p in gold.posts), args.out)
    print(f"wrote {len(gold.posts)} predictions to {args.out}")
    return 0


def cmd_select_attn(args, config: Config) -> int:
    resources = _load_resources(args, config)
    _, posts = _read_scored(args.interchange, resources)
    rule_config = attn_select.RuleConfig(
        percentile=args.percentile, threshold=args.threshold,
        rule=args.rule, gate=args.gate,
    )
    overrides: dict[str, bool] = {}
    if args.gate_oracle:
        if not args.gold:
            raise ValidationError("--gate-oracle requires --gold")
        gold = _load_gold(args.gold, args.limit)
        overrides = {p.id: bool(p.gold) for p in gold.posts}
    records = []
    for post in posts:
        records.append(
            (
                post.id,
                attn_select.predict_post(
                    post, rule_config, resources.stopwords,
                    gate_override=overrides.get(post.id),
                ),
            )
        )
    write_predictions(records, args.out)
    print(f"wrote {len(records)} predictions to {args.out}")
    return 0


def cmd_gridsearch_attn(args, config: Config) -> int:
    resources = _load_resources(args, config)
    _, posts = _read_scored(args.interchange, resources)
    gold = _load_gold(args.gold, args.limit)
    by_id = {p.id: p for p in posts}
    dev = []
    for post in gold.posts:
        if post.id in by_id:
            dev.append((by_id[post.id], post.gold))
    if not dev:
        raise DataError("no overlap between interchange and gold post ids")
    thresholds = (
        [float(x) for x in args.thresholds.split(",")]
        if args.thresholds
        else attn_select.DEFAULT_THRESHOLDS
    )
    percentiles = (
        [float(x) for x in args.percentiles.split(",")]
        if args.percentiles
        else attn_select.DEFAULT_PERCENTILES
    )
    result = attn_select.grid_search(
        dev, thresholds, percentiles, rule=args.rule,
        stopwords=resources.stopwords, tau=args.gate,
    )
    print(
        f"best cell: percentile={result.percentile} threshold={result.threshold} "
        f"F1={result.f1:.3f} ({len(result.cells)} cells, {len(dev)} posts)"
    )
    if args.out:
        cells = [
            {"percentile": c.percentile, "threshold": c.threshold, "f1": c.f1}
            for c in result.cells
        ]
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "best": {"percentile": result.percentile,
                             "threshold": result.threshold, "f1": result.f1},
                    "cells": cells,
                },
                fh, indent=2,
            )
        print(f"grid written to {args.out}")
    return 0


def cmd_train_tree(args, config: Config) -> int:
    resources = _load_resources(args, config)
    _, posts = _read_scored(args.interchange, resources)
    gold = _load_gold(args.gold, args.limit)
    by_id = {p.id: p for p in posts}
    samples = []
    from .spans import project_gold_to_tokens

    for post in gold.posts:
        scored = by_id.get(post.id)
        if scored is None:
            continue
        tokens = [w.token for w in scored.words]
        labels = project_gold_to_tokens(post.gold, tokens)
        samples.extend(zip(scored.words, labels))
    if not samples:
        raise DataError("no overlapping posts between interchange and gold")
    tree = attn_tree.train_decision_tree(
        samples, max_depth=args.max_depth, min_leaf=args.min_leaf
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(tree.to_json() + "\n")
    print(f"trained on {len(samples)} words; depth {tree.depth()}; wrote {args.out}")
    return 0


def cmd_predict_tree(args, config: Config) -> int:
    resources = _load_resources(args, config)
    _, posts = _read_scored(args.interchange, resources)
    with open(args.tree, encoding="utf-8") as fh:
        tree = attn_tree.DecisionTree.from_json(fh.read())
    records = []
    from .spans import token_labels_to_index_set

    for post in posts:
        if not attn_select.gate(post, args.gate):
            records.append((post.id, CharIndexSet()))
            continue
        labels = attn_tree.predict_tree(tree, post.words)
        records.append(
            (post.id, token_labels_to_index_set([w.token for w in post.words], labels))
        )
    write_predictions(records, args.out)
    print(f"wrote {len(records)} predictions to {args.out}")
    return 0


def _crf_configs(args, config: Config, emb_dim: int = 0) -> tuple[ModelConfig, TrainConfig]:
    seed = _resolve(args.seed, config, "crf", "seed", _default_seed(), int)
    # the "paper" preset matches the settings used for pretrained-embedding
    # runs; hand-feature training wants the larger defaults
    paper = getattr(args, "preset", None) == "paper"
    model_config = ModelConfig(
        hash_bits=_resolve(args.hash_bits, config, "crf", "hash_bits", 18, int),
        window=_resolve(args.window, config, "crf", "window", 2, int),
        emb_dim=emb_dim,
        hidden_layers=_resolve(args.hidden_layers, config, "crf", "hidden_layers",
                               2 if paper else 0, int),
        hidden_width=_resolve(args.hidden_width, config, "crf", "hidden_width", 16, int),
    )
    train_config = TrainConfig(
        epochs=_resolve(args.epochs, config, "crf", "epochs", 2 if paper else 10, int),
        learning_rate=_resolve(args.learning_rate, config, "crf", "learning_rate",
                               3e-5 if paper else 1e-2, float),
        l2=_resolve(args.l2, config, "crf", "l2", 1e-4, float),
        batch_size=_resolve(args.batch_size, config, "crf", "batch_size", 32, int),
        seed=seed,
        clip=_resolve(args.clip, config, "crf", "clip", 5.0, float),
    )
    return model_config, train_config


def cmd_train_crf(args, config: Config) -> int:
    resources = _load_resources(args, config)
    gold = _load_gold(args.input, args.limit)
    emb_dim = 0
    scored_by_id = {}
    if args.interchange:
        header, scored = _read_scored(args.interchange, resources)
        if not header.emb_dim:
            raise DataError(
                f"{args.interchange} carries no embeddings; re-export with --emb"
            )
        emb_dim = int(header.emb_dim)
        scored_by_id = {p.id: p for p in scored}
    model_config, train_config = _crf_configs(args, config, emb_dim=emb_dim)
    extractor = FeatureExtractor(
        model_config.feature_config(), resources.hate_lexicon, resources.sentiment
    )
    if args.interchange:
        sequences = harness.encode_posts_with_embeddings(
            gold.posts, scored_by_id, extractor
        )
        if not sequences:
            raise DataError("no gold posts with interchange embeddings")
    else:
        sequences = harness.encode_posts(gold.posts, extractor)
    params = params_from_config(model_config, train_config.seed)
    result = train(sequences, params, train_config, extractor)
    manifest = {
        "seed": train_config.seed,
        "epochs": train_config.epochs,
        "learning_rate": train_config.learning_rate,
        "l2": train_config.l2,
        "batch_size": train_config.batch_size,
        "clip": train_config.clip,
        "hash_bits": model_config.hash_bits,
        "window": model_config.window,
        "emb_dim": model_config.emb_dim,
        "hidden_layers": model_config.hidden_layers,
        "hidden_width": model_config.hidden_width,
        "n_sequences": len(sequences),
        "final_loss": f"{result.epoch_losses[-1]:.6f}" if result.epoch_losses else "n/a",
    }
    save_model(result.params, args.model, manifest)
    trace = " ".join(f"{x:.4f}" for x in result.epoch_losses)
    print(f"trained on {len(sequences)} sequences; loss trace: {trace}")
    print(f"model written to {args.model}")
    return 0


def cmd_predict_crf(args, config: Config) -> int:
    resources = _load_resources(args, config)
    gold = _load_gold(args.input, args.limit)
    params, _manifest = load_model(args.model)
    extractor = FeatureExtractor(
        params.meta.feature_config(), resources.hate_lexicon, resources.sentiment
    )
    scored_by_id = {}
    if params.emb_dim:
        if not args.interchange:
            raise ValidationError(
                "model was trained with embeddings; pass --interchange"
            )
        _, scored = _read_scored(args.interchange, resources)
        scored_by_id = {p.id: p for p in scored}
    records = []
    for post in gold.posts:
        if params.emb_dim:
            scored = scored_by_id.get(post.id)
            if scored is None or not scored.words:
                records.append((post.id, CharIndexSet()))
                continue
            pred = predict_tokens(
                params, extractor,
                [w.token for w in scored.words],
                dense=[w.emb for w in scored.words],
            )
        else:
            tokens = tokenize(post.text)
            pred = predict_tokens(params, extractor, tokens) if tokens else CharIndexSet()
        records.append((post.id, pred))
    write_predictions(records, args.out)
    print(f"wrote {len(records)} predictions to {args.out}")
    return 0


def _run_methods(methods, args, config: Config) -> int:
    resources = _load_resources(args, config)
    gold = _load_gold(args.input, args.limit)
    seed = _resolve(args.seed, config, "harness", "seed", _default_seed(), int)
    k = _resolve(args.folds, config, "harness", "folds", 5, int)
    cfg: dict = {}
    for key in ("epochs", "learning_rate", "l2", "batch_size", "hash_bits",
                "hidden_layers", "hidden_width", "window", "clip"):
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    results = []
    for method in methods:
        log.info("cross-validating %s (k=%d, seed=%d)", method, k, seed)
        results.append(
            harness.run_crossval(method, gold.posts, resources, k=k, seed=seed, cfg=cfg)
        )
    report = harness.build_report(results, len(gold.posts), k, seed)
    json_path, table_path = harness.write_report(report, args.out)
    print(open(table_path, encoding="utf-8").read(), end="")
    print(f"report written to {json_path} and {table_path}")
    return 0


def cmd_crossval_crf(args, config: Config) -> int:
    return _run_methods(["crf"], args, config)


def cmd_report(args, config: Config) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise ValidationError("no methods given")
    return _run_methods(methods, args, config)


def cmd_ensemble(args, config: Config) -> int:
    outputs = [read_predictions(path) for path in args.predictions]
    combined = ensemble.combine_predictions(outputs, args.mode)
    write_predictions(sorted(combined.items()), args.out)
    print(f"wrote {len(combined)} {args.mode} predictions to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, *, gold_input: bool = False) -> None:
    p.add_argument("--config", help="INI config file (CLI flags take precedence)")
    p.add_argument("--limit", type=int, default=None, help="cap on input rows")
    if gold_input:
        p.add_argument("--input", required=True, help="span-annotated CSV (spans,text)")


def _add_lexicon_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--hate-lexicon", dest="hate_lexicon")
    p.add_argument("--sentiment-lexicon", dest="sentiment_lexicon")
    p.add_argument("--stopwords")


def _add_crf_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--learning-rate", dest="learning_rate", type=float, default=None)
    p.add_argument("--l2", type=float, default=None)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    p.add_argument("--clip", type=float, default=None)
    p.add_argument("--hash-bits", dest="hash_bits", type=int, default=None)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--hidden-layers", dest="hidden_layers", type=int, default=None)
    p.add_argument("--hidden-width", dest="hidden_width", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toxspan",
        description="Detect which character spans of a comment make it toxic.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize", help="offset-preserving tokenization")
    p.add_argument("text", nargs="*", help="text to tokenize (omit with --input)")
    p.add_argument("--input", help="CSV to tokenize row by row")
    p.add_argument("--out", help="JSONL output (default stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("eval", help="score a prediction file against gold spans")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tag-baseline", help="random / lexicon / sentiment taggers")
    p.add_argument("--method", required=True,
                   choices=["random", "hate", "sentiment", "combined"])
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--p-toxic", dest="p_toxic", type=float, default=None)
    _add_common(p, gold_input=True)
    _add_lexicon_flags(p)
    p.set_defaults(func=cmd_tag_baseline)

    p = sub.add_parser("select-attn", help="rule-based attention span selection")
    p.add_argument("--interchange", required=True)
    p.add_argument("--rule", default="R1", choices=list(attn_select.RULES))
    p.add_argument("--percentile", type=float, default=0.75)
    p.add_argument("--threshold", type=float, default=1e-4)
    p.add_argument("--gate", type=float, default=0.5)
    p.add_argument("--gate-oracle", dest="gate_oracle", action="store_true",
                   help="gate on gold non-emptiness instead of sent_prob")
    p.add_argument("--gold", help="gold CSV (required with --gate-oracle)")
    p.add_argument("--out", required=True)
    _add_common(p)
    _add_lexicon_flags(p)
    p.set_defaults(func=cmd_select_attn)

    p = sub.add_parser("gridsearch-attn", help="exhaustive threshold/percentile search")
    p.add_argument("--interchange", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--rule", default="R1", choices=list(attn_select.RULES))
    p.add_argument("--gate", type=float, default=0.5)
    p.add_argument("--thresholds", help="comma-separated grid")
    p.add_argument("--percentiles", help="comma-separated grid")
    p.add_argument("--out")
    _add_common(p)
    _add_lexicon_flags(p)
    p.set_defaults(func=cmd_gridsearch_attn)

    p = sub.add_parser("train-tree", help="CART span selector over word features")
    p.add_argument("--interchange", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-depth", dest="max_depth", type=int, default=5)
    p.add_argument("--min-leaf", dest="min_leaf", type=int, default=20)
    _add_common(p)
    _add_lexicon_flags(p)
    p.set_defaults(func=cmd_train_tree)

    p = sub.add_parser("predict-tree", help="apply a trained decision tree")
    p.add_argument("--tree", required=True)
    p.add_argument("--interchange", required=True)
    p.add_argument("--gate", type=float, default=0.5)
    p.add_argument("--out", required=True)
    _add_common(p)
    _add_lexicon_flags(p)
    p.set_defaults(func=cmd_predict_tree)

    p = sub.add_parser("train-crf", help="train the chain CRF tagger")
    p.add_argument("--model", required=True, help="output model path")
    p.add_argument("--interchange",
                   help="use exported word embeddings as dense features")
    p.add_argument("--preset", choices=["paper"],
                   help="settings for pretrained-embedding runs")
    _add_common(p, gold_input=True)
    _add_lexicon_flags(p)
    _add_crf_flags(p)
    p.set_defaults(func=cmd_train_crf)

    p = sub.add_parser("predict-crf", help="predict spans with a trained CRF")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--interchange",
                   help="interchange file (required for embedding-backed models)")
    _add_common(p, gold_input=True)
    _add_lexicon_flags(p)
    p.set_defaults(func=cmd_predict_crf)

    p = sub.add_parser("crossval-crf", help="k-fold cross-validation of the CRF")
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--out", required=True, help="report path (JSON + .txt table)")
    _add_common(p, gold_input=True)
    _add_lexicon_flags(p)
    _add_crf_flags(p)
    p.set_defaults(func=cmd_crossval_crf)

    p = sub.add_parser("ensemble", help="combine prediction files")
    p.add_argument("--mode", required=True, choices=["vote", "intersect"])
    p.add_argument("predictions", nargs="+", help="two or more prediction files")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("report", help="cross-validate several methods")
    p.add_argument("--methods", default="random,hate,sentiment,combined",
                   help="comma-separated subset of: " + ",".join(harness.METHODS))
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    _add_common(p, gold_input=True)
    _add_lexicon_flags(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = Config(getattr(args, "config", None))
        return args.func(args, config)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
