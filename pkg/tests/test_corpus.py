import pytest
from hypothesis import given, strategies as st

from toxspan.corpus import (
    SentencePost,
    balanced_sample,
    load_lexicon,
    load_sentence_dataset,
    load_sentiment_lexicon,
    load_toxic_spans,
    normalize,
    normalize_term,
    parse_span_literal,
)
from toxspan.errors import DataError, ValidationError
from toxspan.spans import CharIndexSet


class TestNormalize:
    def test_lowercase_and_strip_trailing_punct(self):
        norm, omap = normalize("You FOOL!")
        assert norm == "you fool"
        assert omap.to_original(7) == 7
        assert omap.to_original(0) == 0

    def test_intra_word_symbols_kept(self):
        norm, _ = normalize("a$$hole")
        assert norm == "a$$hole"

    def test_empty(self):
        norm, omap = normalize("")
        assert norm == "" and len(omap) == 0

    def test_leading_punct_dropped(self):
        norm, omap = normalize("!!win")
        assert norm == "win"
        assert omap.to_original(0) == 2

    def test_span_mapping(self):
        text = "Go AWAY!! now"
        norm, omap = normalize(text)
        assert norm == "go away now"
        start, end = norm.index("away"), norm.index("away") + 4
        ostart, oend = omap.span_to_original(start, end)
        assert text[ostart:oend] == "AWAY"

    @given(st.text(max_size=120))
    def test_map_points_at_source(self, text):
        norm, omap = normalize(text)
        assert len(omap) == len(norm)
        for p, c in enumerate(norm):
            orig = text[omap.to_original(p)]
            assert orig == c or orig.lower() == c

    @given(st.text(max_size=120))
    def test_idempotent(self, text):
        norm, _ = normalize(text)
        again, _ = normalize(norm)
        assert again == norm


class TestParseSpanLiteral:
    def test_empty(self):
        assert parse_span_literal("[]") == CharIndexSet()

    def test_basic(self):
        assert parse_span_literal("[3, 4, 5]") == CharIndexSet({3, 4, 5})

    def test_sort_dedup(self):
        assert parse_span_literal("[5,3,3,4]") == CharIndexSet({3, 4, 5})

    def test_whitespace_tolerant(self):
        assert parse_span_literal("  [ 1 ,2 ]  ") == CharIndexSet({1, 2})

    @pytest.mark.parametrize("bad", ["", "3, 4", "[3 4]", "[3,]", "[3", "[a]", "[3]x"])
    def test_malformed_reports_column(self, bad):
        with pytest.raises(DataError, match="column"):
            parse_span_literal(bad)

    def test_negative_index(self):
        with pytest.raises(ValidationError, match="negative"):
            parse_span_literal("[3, -4]")

    @given(st.frozensets(st.integers(min_value=0, max_value=500), max_size=30))
    def test_round_trip(self, indices):
        s = CharIndexSet(indices)
        assert parse_span_literal(s.serialize()) == s


class TestLoadToxicSpans:
    def test_basic_row(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text('spans,text\n"[0,1]",ab cd\n')
        result = load_toxic_spans(path)
        assert len(result.posts) == 1
        assert result.posts[0].gold == CharIndexSet({0, 1})
        assert result.posts[0].text == "ab cd"

    def test_out_of_bounds_dropped(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text('spans,text\n"[0, 10]",abcde\n')
        result = load_toxic_spans(path)
        assert result.n_dropped_indices == 1
        assert result.posts[0].gold == CharIndexSet({0})

    def test_missing_column_fatal(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("spans,body\n[],x\n")
        with pytest.raises(DataError, match="text"):
            load_toxic_spans(path)

    def test_bad_row_skipped(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text('spans,text\nnot-a-list,hello\n"[1]",ok\n')
        result = load_toxic_spans(path)
        assert result.n_skipped_rows == 1
        assert len(result.posts) == 1

    def test_limit(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("spans,text\n" + "".join(f'"[]",row{i}\n' for i in range(10)))
        assert len(load_toxic_spans(path, limit=3).posts) == 3


class TestLoadSentenceDataset:
    def _write(self, tmp_path, rows):
        path = tmp_path / "s.csv"
        path.write_text(
            "id,comment_text,target\n" + "".join(f"{i},{t},{s}\n" for i, (t, s) in enumerate(rows))
        )
        return path

    def test_threshold_strictly_above(self, tmp_path):
        path = self._write(tmp_path, [("a", 0.7), ("b", 0.5), ("c", 0.2)])
        posts = load_sentence_dataset(path).posts
        assert [p.hateful for p in posts] == [True, False, False]

    def test_out_of_range_rejected(self, tmp_path):
        path = self._write(tmp_path, [("a", 1.2), ("b", 0.4)])
        result = load_sentence_dataset(path)
        assert result.n_rejected == 1
        assert len(result.posts) == 1

    def test_custom_columns(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("pk,body,tox\n7,hey,0.9\n")
        result = load_sentence_dataset(path, id_col="pk", text_col="body", score_col="tox")
        assert result.posts[0].id == "7" and result.posts[0].hateful


class TestBalancedSample:
    def _posts(self, n_hate, n_clean):
        posts = [SentencePost(f"h{i}", "x", 0.9, True) for i in range(n_hate)]
        posts += [SentencePost(f"c{i}", "x", 0.1, False) for i in range(n_clean)]
        return posts

    def test_exact_balance(self):
        sample = balanced_sample(self._posts(10, 10), 4, seed=1)
        assert len(sample) == 4
        assert sum(p.hateful for p in sample) == 2

    def test_deterministic(self):
        posts = self._posts(20, 20)
        a = balanced_sample(posts, 10, seed=5)
        b = balanced_sample(posts, 10, seed=5)
        assert [p.id for p in a] == [p.id for p in b]
        c = balanced_sample(posts, 10, seed=6)
        assert [p.id for p in a] != [p.id for p in c]

    def test_insufficient_class_named(self):
        with pytest.raises(DataError, match="hateful"):
            balanced_sample(self._posts(1, 10), 4, seed=0)

    def test_odd_total_rejected(self):
        with pytest.raises(ValidationError):
            balanced_sample(self._posts(5, 5), 3, seed=0)


class TestLexicons:
    def test_hate_lexicon_normalized(self, tmp_path):
        path = tmp_path / "lex.txt"
        path.write_text("# comment\nIdiot\na$$hole\n\nfool!  \n")
        lex = load_lexicon(path)
        assert "idiot" in lex
        assert "a$$hole" in lex
        assert "fool" in lex
        assert len(lex) == 3

    def test_sentiment_lexicon(self, tmp_path):
        path = tmp_path / "s.tsv"
        path.write_text("# c\nterrible\t-0.6\nGreat\t0.8\n")
        lex = load_sentiment_lexicon(path)
        assert lex.polarity("terrible") == -0.6
        assert lex.polarity("great") == 0.8
        assert lex.polarity("unknown") == 0.0

    def test_sentiment_bounds(self, tmp_path):
        path = tmp_path / "s.tsv"
        path.write_text("word\t1.5\n")
        with pytest.raises(DataError):
            load_sentiment_lexicon(path)

    def test_normalize_term(self):
        assert normalize_term("  IdIoT!! ") == "idiot"


def test_bundled_sample_loads(sample_posts):
    assert len(sample_posts) == 200
    assert sum(1 for p in sample_posts if p.gold) == 175
