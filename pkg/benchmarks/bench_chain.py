#!/usr/bin/env python3
"""Benchmark the compiled chain kernels against the pure-numpy fallback.

Runs the three kernels over a corpus-shaped workload (many short label
chains, L=3) plus one full training epoch, and prints the speedup.

    python3 benchmarks/bench_chain.py [--seqs 2000] [--len 35] [--repeat 3]
"""

import argparse
import time

import numpy as np

from toxspan.corpus import AnnotatedPost, Lexicon
from toxspan.crf import _chain_py
from toxspan.crf import (
    FeatureExtractor,
    ModelConfig,
    TrainConfig,
    params_from_config,
    train,
)
from toxspan.harness import encode_posts
from toxspan.spans import CharIndexSet

try:
    from toxspan.crf import _chain

    BACKENDS = {"cython": _chain, "python": _chain_py}
except ImportError:
    print("compiled backend not built; benchmarking the fallback only")
    BACKENDS = {"python": _chain_py}


def make_instances(n_seqs, seq_len, rng):
    out = []
    for _ in range(n_seqs):
        n = max(1, int(rng.normal(seq_len, seq_len / 4)))
        out.append(
            (
                rng.normal(scale=2.0, size=(n, 3)),
                rng.normal(scale=1.0, size=(3, 3)),
                rng.normal(size=3),
                rng.normal(size=3),
            )
        )
    return out


def time_kernel(impl, fn_name, instances, repeat):
    fn = getattr(impl, fn_name)
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        for psi, trans, s, e in instances:
            fn(psi, trans, s, e)
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(args):
    rng = np.random.default_rng(0)
    instances = make_instances(args.seqs, args.len, rng)
    print(f"\nkernels over {args.seqs} chains of ~{args.len} positions "
          f"(best of {args.repeat}):")
    print(f"{'kernel':<18}" + "".join(f"{n:>12}" for n in BACKENDS) +
          ("{:>10}".format("speedup") if len(BACKENDS) == 2 else ""))
    for fn_name in ("log_partition", "forward_backward", "viterbi"):
        times = {name: time_kernel(impl, fn_name, instances, args.repeat)
                 for name, impl in BACKENDS.items()}
        row = f"{fn_name:<18}" + "".join(f"{times[n]*1e3:>10.1f}ms" for n in times)
        if len(times) == 2:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)


def bench_training(args):
    rng = np.random.default_rng(1)
    vocab = "alpha bravo charlie delta echo foxtrot golf hotel grunk".split()
    posts = []
    for i in range(args.seqs // 4):
        words = rng.choice(vocab, size=12).tolist()
        text = " ".join(words)
        gold = set()
        pos = 0
        for w in words:
            if w == "grunk":
                gold.update(range(pos, pos + len(w)))
            pos += len(w) + 1
        posts.append(AnnotatedPost(str(i), text, CharIndexSet(gold)))
    config = ModelConfig(hash_bits=14)
    extractor = FeatureExtractor(
        config.feature_config(), hate_lexicon=Lexicon(frozenset({"grunk"}))
    )
    sequences = encode_posts(posts, extractor)
    import toxspan.crf.model as model_module

    print(f"\none training epoch over {len(sequences)} sequences:")
    results = {}
    saved_impl = model_module.kernels._impl
    try:
        for name, impl in BACKENDS.items():
            model_module.kernels._impl = impl
            start = time.perf_counter()
            train(sequences, params_from_config(config, 0),
                  TrainConfig(epochs=1, seed=0), extractor)
            results[name] = time.perf_counter() - start
            print(f"  {name:<8} {results[name]*1e3:>8.1f}ms")
    finally:
        model_module.kernels._impl = saved_impl
    if len(results) == 2:
        print(f"  speedup  {results['python'] / results['cython']:>7.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seqs", type=int, default=2000)
    parser.add_argument("--len", type=int, default=35)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    bench_kernels(args)
    bench_training(args)


if __name__ == "__main__":
    main()
