import numpy as np
import pytest
from conftest import tiny_config

from truecaser.errors import EmptyCorpus, NonFiniteLoss
from truecaser.model import TruecaserModel, batch_loss
from truecaser.toydata import toy_corpus
from truecaser.training import (
    TrainOptions, as_examples, sentence_error_rate, train, word_label_accuracy,
)

CORPUS = [["The", "iPhone", "works"], ["NASA", "is", "big"], ["hello", "there"], ["Paris", ","]]


def _opts(**kw):
    base = dict(epochs=3, lr=0.3, batch=2, seed=0, patience=None)
    base.update(kw)
    return TrainOptions(**base)


class TestTrain:
    def test_zero_epochs_is_initialization(self):
        cfg = tiny_config()
        res = train(CORPUS, cfg, _opts(epochs=0, seed=5))
        ref = TruecaserModel.initialize(cfg, 5)
        assert res.history == []
        for k in ref.params:
            np.testing.assert_array_equal(res.model.params[k], ref.params[k])

    def test_alphabet_filled_from_corpus(self):
        res = train(CORPUS, tiny_config(alphabet=""), _opts(epochs=0))
        assert set(res.model.config.alphabet) == set("".join(w.lower() for s in CORPUS for w in s))

    def test_same_seed_bit_identical(self):
        cfg = tiny_config(dropout_rate=0.25)
        a = train(CORPUS, cfg, _opts(seed=3)).model
        b = train(CORPUS, cfg, _opts(seed=3)).model
        c = train(CORPUS, cfg, _opts(seed=4)).model
        for k in a.params:
            assert a.params[k].tobytes() == b.params[k].tobytes()
        assert any(a.params[k].tobytes() != c.params[k].tobytes() for k in a.params)

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            train([], tiny_config(), _opts())

    @pytest.mark.parametrize("bad", [dict(epochs=-1), dict(batch=0), dict(lr=-1.0), dict(patience=0)])
    def test_bad_options(self, bad):
        with pytest.raises(ValueError):
            TrainOptions(**bad)

    def test_loss_decreases(self):
        cfg = tiny_config(size=8)
        res = train(CORPUS, cfg, _opts(epochs=80))
        assert res.history[-1].mean_loss < 0.1 * res.history[0].mean_loss
        assert list(res.model.config.alphabet)  # filled from data

    def test_best_dev_series_monotone(self):
        data = toy_corpus(30, seed=1)
        res = train(data[:20], tiny_config(size=8), _opts(epochs=6, patience=None), dev=data[20:])
        best = [r.best_dev_sentence_error_rate for r in res.history]
        assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))
        assert best[-1] == min(r.dev_sentence_error_rate for r in res.history)
        # returned model is the best checkpoint
        assert sentence_error_rate(res.model, [ex.reference for ex in as_examples(data[20:])]) == best[-1]

    def test_patience_stops_early(self):
        # zero learning rate never improves after the first epoch
        data = toy_corpus(10, seed=2)
        res = train(data, tiny_config(), _opts(epochs=20, lr=0.0, patience=2), dev=data)
        assert len(res.history) == 3
        assert res.best_epoch == 1

    def test_non_finite_loss(self):
        cfg = tiny_config()
        init = TruecaserModel.initialize(cfg, 0)
        init.params["word_out.b"][0] = np.nan
        with pytest.raises(NonFiniteLoss):
            train(CORPUS, cfg, _opts(epochs=1), init=init)

    def test_callback_sees_each_epoch(self):
        seen = []
        train(CORPUS, tiny_config(), _opts(epochs=2), callback=lambda rec, m: seen.append(rec.epoch))
        assert seen == [1, 2]

    def test_many_steps_stay_finite(self):
        rng = np.random.default_rng(0)
        letters = list("abcdefgABCDEFG")
        data = [["".join(rng.choice(letters, size=rng.integers(1, 6))) for _ in range(rng.integers(1, 5))]
                for _ in range(50)]
        cfg = tiny_config(dropout_rate=0.25)
        model = TruecaserModel.initialize(cfg, 0)
        res = train(data, cfg, TrainOptions(epochs=40, lr=1.0, batch=2, clip=5.0, patience=None),
                    init=model)
        assert len(res.history) == 40  # 1000 updates
        assert all(np.isfinite(p).all() for p in res.model.params.values())
        loss, _, _ = batch_loss(res.model, as_examples(data), grad=False)
        assert np.isfinite(loss)


class TestMetrics:
    def test_sentence_error_rate_empty(self):
        assert sentence_error_rate(TruecaserModel.initialize(tiny_config(), 0), []) == 0.0

    def test_word_label_accuracy_range(self):
        m = TruecaserModel.initialize(tiny_config(), 0)
        acc = word_label_accuracy(m, CORPUS)
        assert 0.0 <= acc <= 1.0
