"""Offset-preserving word tokenizer.

Splitting is deterministic and offset-exact: every token records the exact
slice of the original text it came from, so predictions can be mapped back
to character indices without any re-alignment step.

A word is a maximal run of alphanumeric characters, optionally containing
interior joiner runs (``' - _ $ * @ #``) that are flanked by alphanumerics
on both sides.  That keeps obfuscated words like ``a$$hole`` and ``pu55y``
whole.  Any other non-whitespace character becomes a single-character token.
"""

from __future__ import annotations

from dataclasses import dataclass

JOINERS = frozenset("'-_$*@#")


def fold_case(s: str) -> str:
    """Lowercase only where the lowercase form is a single scalar.

    Length-changing case mappings (e.g. 'İ' -> 'i̇') would break the
    position-to-position offset contract, so those characters pass through.
    """
    out = []
    for c in s:
        low = c.lower()
        out.append(low if len(low) == 1 else c)
    return "".join(out)


@dataclass(frozen=True, slots=True)
class Token:
    """Surface form plus its [start, end) span in the ORIGINAL text."""

    surface: str
    start: int
    end: int
    norm: str

    @classmethod
    def make(cls, text: str, start: int, end: int) -> "Token":
        surface = text[start:end]
        return cls(surface, start, end, fold_case(surface))


def tokenize(text: str) -> list[Token]:
    """Split text into non-overlapping tokens sorted by start offset."""
    tokens: list[Token] = []
    n = len(text)
    i = 0
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if not c.isalnum():
            tokens.append(Token.make(text, i, i + 1))
            i += 1
            continue
        j = i + 1
        while j < n and text[j].isalnum():
            j += 1
        # absorb joiner runs only when alphanumerics continue on the far side
        while j < n and text[j] in JOINERS:
            k = j
            while k < n and text[k] in JOINERS:
                k += 1
            if k < n and text[k].isalnum():
                j = k + 1
                while j < n and text[j].isalnum():
                    j += 1
            else:
                break
        tokens.append(Token.make(text, i, j))
        i = j
    return tokens
