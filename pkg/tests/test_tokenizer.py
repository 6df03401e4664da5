from hypothesis import given, strategies as st

from toxspan.tokenizer import Token, fold_case, tokenize


def spans(tokens):
    return [(t.surface, t.start, t.end) for t in tokens]


def test_empty_text():
    assert tokenize("") == []


def test_plain_words():
    assert spans(tokenize("you are stupid")) == [
        ("you", 0, 3),
        ("are", 4, 7),
        ("stupid", 8, 14),
    ]


def test_intra_word_symbols_stay_joined():
    assert spans(tokenize("a$$hole!")) == [("a$$hole", 0, 7), ("!", 7, 8)]
    assert spans(tokenize("pu55y")) == [("pu55y", 0, 5)]
    assert spans(tokenize("don't")) == [("don't", 0, 5)]


def test_trailing_joiner_splits():
    # joiners not flanked by alphanumerics on both sides are separate tokens
    assert spans(tokenize("well- said")) == [("well", 0, 4), ("-", 4, 5), ("said", 6, 10)]
    assert spans(tokenize("$$")) == [("$", 0, 1), ("$", 1, 2)]


def test_punctuation_single_tokens():
    assert spans(tokenize("no!!")) == [("no", 0, 2), ("!", 2, 3), ("!", 3, 4)]


def test_norm_lowercases():
    (t,) = tokenize("FOOL")
    assert t.norm == "fool"


def test_unicode_offsets():
    text = "naïve fool 🤡 here"
    tokens = tokenize(text)
    assert [t.surface for t in tokens] == ["naïve", "fool", "🤡", "here"]
    for t in tokens:
        assert text[t.start : t.end] == t.surface


def test_fold_case_preserves_length():
    assert fold_case("İstanbul")[0] == "İ"  # multi-scalar lowercase left alone
    assert fold_case("ABC") == "abc"


@given(st.text(max_size=200))
def test_slice_round_trip(text):
    tokens = tokenize(text)
    prev_end = -1
    for t in tokens:
        assert text[t.start : t.end] == t.surface
        assert t.start >= prev_end  # non-overlapping, sorted
        prev_end = t.end


@given(st.text(max_size=200))
def test_non_whitespace_covered(text):
    # every non-whitespace character belongs to exactly one token
    covered = set()
    for t in tokenize(text):
        covered.update(range(t.start, t.end))
    expected = {i for i, c in enumerate(text) if not c.isspace()}
    assert covered == expected
