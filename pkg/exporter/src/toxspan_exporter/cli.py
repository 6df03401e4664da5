"""CLI: ``toxspan-export export`` runs a checkpoint over a corpus CSV and
writes the interchange file; ``toxspan-export validate`` checks one."""

from __future__ import annotations

import argparse
import sys

from .export import ATTN_MODES, HEAD_POOLS, ExportOptions, export
from .validate import validate


def cmd_export(args) -> int:
    options = ExportOptions(
        max_tokens=args.max_tokens,
        layer=args.layer,
        head_pool=args.head_pool,
        attn_mode=args.attn_mode,
        toxic_class=args.toxic_class,
        with_embeddings=args.emb,
        batch_size=args.batch_size,
        text_col=args.text_col,
        limit=args.limit,
    )
    stats = export(args.model, args.input, args.out, options)
    print(
        f"exported {stats.n_rows} rows to {args.out} "
        f"(checkpoint {stats.checkpoint_digest}, {stats.n_truncated} truncated"
        + (f", emb_dim {stats.emb_dim}" if stats.emb_dim else "")
        + ")"
    )
    return 0


def cmd_validate(args) -> int:
    report = validate(args.file)
    if report.ok:
        print(f"{report.n_records} records, {report.n_words} words, 0 violations")
        return 0
    for violation in report.violations:
        print(violation, file=sys.stderr)
    print(f"{len(report.violations)} violations", file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toxspan-export",
        description="Export transformer attention/embeddings for toxspan.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="run a checkpoint over a corpus CSV")
    p.add_argument("--model", required=True, help="checkpoint path or hub id")
    p.add_argument("--input", required=True, help="corpus CSV")
    p.add_argument("--out", required=True, help="interchange output path")
    p.add_argument("--emb", action="store_true", help="also export embeddings")
    p.add_argument("--max-tokens", dest="max_tokens", type=int, default=400)
    p.add_argument("--layer", type=int, default=-1,
                   help="attention layer to read (default: last)")
    p.add_argument("--head-pool", dest="head_pool", choices=list(HEAD_POOLS),
                   default="mean")
    p.add_argument("--attn-mode", dest="attn_mode", choices=list(ATTN_MODES),
                   default="cls")
    p.add_argument("--toxic-class", dest="toxic_class", type=int, default=1)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=8)
    p.add_argument("--text-col", dest="text_col", default="text")
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("validate", help="check an interchange file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RuntimeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
