"""Word boundaries from the toxspan CLI.

The exporter never imports the toxspan package; word spans come from its
``tokenize`` subcommand so both sides agree on boundaries by construction.
"""

from __future__ import annotations

import json
import subprocess
import sys
import tempfile
from pathlib import Path


class WordBoundaryError(RuntimeError):
    pass


def word_spans_for_csv(csv_path: str, limit: int | None = None) -> dict[str, list[tuple[int, int]]]:
    """Per-row word spans, keyed by the row id the toxspan loader assigns."""
    with tempfile.TemporaryDirectory() as tmp:
        out_path = Path(tmp) / "tokens.jsonl"
        cmd = [sys.executable, "-m", "toxspan.cli", "tokenize",
               "--input", str(csv_path), "--out", str(out_path)]
        if limit is not None:
            cmd += ["--limit", str(limit)]
        proc = subprocess.run(cmd, capture_output=True, text=True)
        if proc.returncode != 0:
            raise WordBoundaryError(
                f"toxspan tokenize failed (exit {proc.returncode}): "
                f"{proc.stderr.strip() or proc.stdout.strip()}"
            )
        spans: dict[str, list[tuple[int, int]]] = {}
        with open(out_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                spans[str(rec["id"])] = [
                    (int(t["start"]), int(t["end"])) for t in rec["tokens"]
                ]
        return spans
