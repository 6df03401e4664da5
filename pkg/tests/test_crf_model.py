import numpy as np
import pytest

from crf_test_utils import (
    finite_difference_grads,
    make_random_batch,
    make_random_model,
    max_relative_error,
)
from toxspan.corpus import Lexicon
from toxspan.crf import (
    EncodedSequence,
    FeatureConfig,
    FeatureExtractor,
    FeatureVector,
    init_params,
    load_model,
    save_model,
)
from toxspan.crf.model import (
    decode,
    emission_scores,
    neg_log_likelihood_and_grad,
    predict_post,
)
from toxspan.errors import DataError, ValidationError
from toxspan.spans import CharIndexSet, Label
from toxspan.tokenizer import tokenize


class TestFeatureExtractor:
    def test_deterministic(self):
        ex = FeatureExtractor(FeatureConfig(hash_bits=12))
        tokens = tokenize("x y z w x y z w x y z w")
        feats = ex.featurize(tokens)
        feats2 = ex.featurize(tokens)
        for a, b in zip(feats, feats2):
            np.testing.assert_array_equal(a.ids, b.ids)
        # identical word in an identical +-2 context hashes identically
        np.testing.assert_array_equal(feats[5].ids, feats[9].ids)

    def test_is_hate_feature_changes_ids(self):
        config = FeatureConfig(hash_bits=12)
        plain = FeatureExtractor(config)
        with_lex = FeatureExtractor(config, hate_lexicon=Lexicon(frozenset({"fool"})))
        tokens = tokenize("fool")
        a = plain.featurize(tokens)[0].ids
        b = with_lex.featurize(tokens)[0].ids
        assert set(b) - set(a)  # the is_hate feature appeared

    def test_boundary_flags(self):
        ex = FeatureExtractor(FeatureConfig(hash_bits=12))
        bos = ex._hash("bos")
        eos = ex._hash("eos")
        feats = ex.featurize(tokenize("one two three"))
        assert bos in feats[0].ids and bos not in feats[1].ids
        assert eos in feats[2].ids and eos not in feats[1].ids

    def test_ids_inside_hash_space(self):
        ex = FeatureExtractor(FeatureConfig(hash_bits=8))
        for fv in ex.featurize(tokenize("some words with둘 digits 123 sym-bols")):
            assert fv.ids.max() < 256 and fv.ids.min() >= 0


class TestEmissionScores:
    def test_zero_weights(self):
        params = init_params(n_sparse=8, seed=0)
        params.emit[:] = 0.0
        feats = [FeatureVector(np.array([1, 3]))]
        np.testing.assert_array_equal(emission_scores(params, feats), np.zeros((1, 3)))

    def test_one_hot_selects_column(self):
        params = init_params(n_sparse=6, seed=1)
        feats = [FeatureVector(np.array([4]))]
        np.testing.assert_allclose(
            emission_scores(params, feats)[0], params.emit[:, 4]
        )

    def test_matches_naive_matmul(self):
        rng = np.random.default_rng(0)
        for hidden_layers in (0, 1, 2):
            params = make_random_model(
                rng, n_sparse=7, emb_dim=3, hidden_layers=hidden_layers, hidden_width=4
            )
            batch = make_random_batch(rng, params, n_seqs=1, max_len=5)
            feats = batch[0].features
            # naive: materialize x and multiply through the stack
            xs = []
            for fv in feats:
                x = np.zeros(params.n_input)
                x[fv.ids] = 1.0
                x[params.n_sparse :] = fv.dense
                xs.append(x)
            h = np.stack(xs)
            for W, b in params.hidden:
                h = np.tanh(h @ W.T + b)
            want = h @ params.emit.T
            got = emission_scores(params, feats)
            np.testing.assert_allclose(got, want, atol=1e-12)

    def test_dense_dim_mismatch(self):
        params = init_params(n_sparse=4, emb_dim=3, seed=0)
        feats = [FeatureVector(np.array([0]), np.zeros(2))]
        with pytest.raises(ValidationError):
            emission_scores(params, feats)


class TestNegLogLikelihood:
    def test_uniform_single_token(self):
        params = init_params(n_sparse=4, seed=0)
        params.emit[:] = 0.0
        seq = EncodedSequence([FeatureVector(np.array([1]))], np.array([0]))
        loss, _ = neg_log_likelihood_and_grad(params, [seq], l2=0.0)
        assert loss == pytest.approx(np.log(3))

    def test_duplicated_sequence_doubles_gradient(self):
        rng = np.random.default_rng(2)
        params = make_random_model(rng, n_sparse=6)
        (seq,) = make_random_batch(rng, params, n_seqs=1, max_len=4)
        loss1, g1 = neg_log_likelihood_and_grad(params, [seq], l2=0.0)
        loss2, g2 = neg_log_likelihood_and_grad(params, [seq, seq], l2=0.0)
        assert loss2 == pytest.approx(2 * loss1)
        for name in g1:
            np.testing.assert_allclose(g2[name], 2 * g1[name], atol=1e-12)

    def test_l2_term(self):
        rng = np.random.default_rng(3)
        params = make_random_model(rng, n_sparse=5)
        batch = make_random_batch(rng, params, n_seqs=1)
        loss0, _ = neg_log_likelihood_and_grad(params, batch, l2=0.0)
        loss1, _ = neg_log_likelihood_and_grad(params, batch, l2=0.5)
        sq = sum(float((a * a).sum()) for _, a in params.named_arrays())
        assert loss1 == pytest.approx(loss0 + 0.5 * sq)

    @pytest.mark.parametrize("hidden_layers,emb_dim,l2", [
        (0, 0, 0.0), (0, 2, 0.01), (1, 0, 0.0), (1, 2, 0.01), (2, 2, 0.0),
    ])
    def test_gradient_matches_finite_differences(self, hidden_layers, emb_dim, l2):
        rng = np.random.default_rng(hidden_layers * 31 + emb_dim)
        params = make_random_model(
            rng, n_sparse=5, emb_dim=emb_dim,
            hidden_layers=hidden_layers, hidden_width=4,
        )
        batch = make_random_batch(rng, params, n_seqs=2, max_len=4)
        _, analytic = neg_log_likelihood_and_grad(params, batch, l2)
        numeric = finite_difference_grads(params, batch, l2)
        assert max_relative_error(analytic, numeric) < 1e-4


class TestDecode:
    def test_emission_dominated(self):
        params = init_params(n_sparse=4, seed=0)
        params.emit[:] = 0.0
        params.emit[Label.NONTOXIC, :] = 5.0
        feats = [FeatureVector(np.array([i])) for i in range(3)]
        assert decode(params, feats) == [Label.NONTOXIC] * 3

    def test_predict_post_constructed_weights(self):
        # force TOXIC exactly on the word "idiotic"
        text = "pick exceptionally idiotic arrogant leaders"
        config = FeatureConfig(hash_bits=12)
        ex = FeatureExtractor(config)
        params = init_params(n_sparse=config.hash_space, seed=0)
        params.emit[:] = 0.0
        params.emit[Label.NONTOXIC, :] = 0.01
        target = ex._hash("w[0]=idiotic")
        params.emit[Label.TOXIC, target] = 10.0
        got = predict_post(params, ex, text)
        start = text.index("idiotic")
        assert got == CharIndexSet(range(start, start + len("idiotic")))

    def test_empty_tokens_predict_empty(self):
        params = init_params(n_sparse=16, seed=0)
        ex = FeatureExtractor(FeatureConfig(hash_bits=4))
        assert predict_post(params, ex, "   ") == CharIndexSet()


class TestModelFile:
    @pytest.mark.parametrize("hidden_layers,emb_dim", [(0, 0), (1, 3), (2, 0)])
    def test_round_trip(self, tmp_path, hidden_layers, emb_dim):
        rng = np.random.default_rng(9)
        params = make_random_model(
            rng, n_sparse=32, emb_dim=emb_dim,
            hidden_layers=hidden_layers, hidden_width=5,
        )
        path = tmp_path / "model.crf"
        save_model(params, path, {"seed": 7, "note": "test"})
        loaded, manifest = load_model(path)
        assert manifest["seed"] == "7"
        assert loaded.n_sparse == params.n_sparse
        assert loaded.emb_dim == params.emb_dim
        for (name_a, a), (name_b, b) in zip(
            params.named_arrays(), loaded.named_arrays()
        ):
            assert name_a == name_b
            np.testing.assert_array_equal(a, b)

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.crf"
        path.write_bytes(b"not a model at all, sorry")
        with pytest.raises(DataError):
            load_model(path)

    def test_rejects_truncation(self, tmp_path):
        rng = np.random.default_rng(10)
        params = make_random_model(rng, n_sparse=16)
        path = tmp_path / "model.crf"
        save_model(params, path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) - 8])
        with pytest.raises(DataError, match="truncated"):
            load_model(path)
