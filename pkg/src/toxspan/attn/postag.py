"""Coarse heuristic part-of-speech tagger.

Used only when the interchange file carries no POS column.  Twelve
universal-style tags, assigned from closed-class word lists plus suffix
rules; everything else defaults to NOUN.  Crude by design: POS is just one
feature of the span-selection tree.
"""

from __future__ import annotations

from .. import tokenizer

UNIVERSAL_TAGS = (
    "VERB", "NOUN", "PRON", "ADJ", "ADV", "ADP",
    "CONJ", "DET", "NUM", "PRT", "PUNCT", "X",
)

_PRONOUNS = frozenset(
    "i you he she it we they me him her us them mine yours hers ours theirs "
    "my your his its our their myself yourself himself herself itself "
    "ourselves themselves who whom whose this that these those anyone "
    "someone everyone nobody anybody somebody everybody".split()
)
_DETERMINERS = frozenset(
    "a an the some any no every each all both few many much several "
    "either neither another such what which".split()
)
_ADPOSITIONS = frozenset(
    "in on at by for with about against between into through during before "
    "after above below from up down of off over under near since until "
    "upon within without toward towards across behind beyond onto".split()
)
_CONJUNCTIONS = frozenset(
    "and or but nor so yet because although though while whereas if unless "
    "when whenever since as than whether".split()
)
_PARTICLES = frozenset("to not n't out".split())
_VERBS = frozenset(
    "be am is are was were been being have has had having do does did done "
    "doing will would shall should can could may might must get got gets "
    "go goes went gone make makes made say says said think thinks thought "
    "know knows knew see sees saw want wants wanted need needs".split()
)
_ADVERBS = frozenset(
    "very too also just now then here there never always often really "
    "quite rather almost already still even again soon maybe perhaps".split()
)

_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ish", "less", "ic", "al")
_VERB_SUFFIXES = ("ing", "ize", "ise", "ify", "ate")
_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ism", "ist", "ship", "ance", "ence")


def _is_number(norm: str) -> bool:
    stripped = norm.replace(",", "").replace(".", "")
    return bool(stripped) and stripped.isdigit()


def pos_tag(token: "tokenizer.Token") -> str:
    norm = token.norm
    if not any(c.isalnum() for c in token.surface):
        return "PUNCT"
    if _is_number(norm):
        return "NUM"
    if norm in _PRONOUNS:
        return "PRON"
    if norm in _DETERMINERS:
        return "DET"
    if norm in _ADPOSITIONS:
        return "ADP"
    if norm in _CONJUNCTIONS:
        return "CONJ"
    if norm in _PARTICLES:
        return "PRT"
    if norm in _VERBS:
        return "VERB"
    if norm in _ADVERBS or (len(norm) > 3 and norm.endswith("ly")):
        return "ADV"
    for suf in _VERB_SUFFIXES:
        if len(norm) > len(suf) + 1 and norm.endswith(suf):
            return "VERB"
    if len(norm) > 3 and norm.endswith("ed"):
        return "VERB"
    for suf in _ADJ_SUFFIXES:
        if len(norm) > len(suf) + 1 and norm.endswith(suf):
            return "ADJ"
    for suf in _NOUN_SUFFIXES:
        if len(norm) > len(suf) + 1 and norm.endswith(suf):
            return "NOUN"
    return "NOUN"
