import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from truecaser.model import ModelConfig, TruecaserModel  # noqa: E402

LETTERS = "abcdefghijklmnopqrstuvwxyz"


def tiny_config(kind="gru", size=4, **kw):
    base = dict(input_embedding_size=size, output_embedding_size=size,
                encoder_cells_per_layer=size, decoder_cells_per_layer=size,
                ngram_buckets=97, char_vocab_size=40, cell_kind=kind, dropout_rate=0.0,
                alphabet=LETTERS + "-'0123456789")
    base.update(kw)
    return ModelConfig(**base)


def random_model(seed=0, kind="gru", scale=1.0, dtype=np.float64, **kw):
    """Untrained model with weights spread wide enough to give peaked outputs."""
    rng = np.random.default_rng(seed)
    cfg = tiny_config(kind, **kw)
    model = TruecaserModel.initialize(cfg, rng, dtype)
    for k, p in model.params.items():
        p[...] = rng.uniform(-scale, scale, p.shape)
    return model


def first_word_upper_teacher():
    """Hand-wired model: OTHER at token 0 with its first character upper, SELF elsewhere."""
    cfg = ModelConfig(input_embedding_size=1, output_embedding_size=1,
                      encoder_cells_per_layer=1, decoder_cells_per_layer=1,
                      ngram_buckets=7, char_vocab_size=2, dropout_rate=0.0, cell_kind="gru")
    model = TruecaserModel.initialize(cfg, 0)
    for p in model.params.values():
        p[...] = 0.0
    P = model.params
    # only the START label row is non-zero, so the decoders can see step 0
    P["word_label_embedding"][2, 0] = 1.0
    P["case_embedding"][2, 0] = 1.0
    # candidate driven by the START input, update gate pinned shut
    P["word_dec.0.W"][2, 2] = 5.0
    P["word_dec.0.b"][1] = -20.0
    P["char_dec.0.W"][3, 2] = 5.0
    P["char_dec.0.b"][1] = -20.0
    for out in ("word_out", "char_out"):
        P[f"{out}.W"][0] = [0.0, 10.0]
        P[f"{out}.b"][:] = [1.0, -2.0]
    return model


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is not None and acc.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acc.RESULTS:
            terminalreporter.write_line(line)
