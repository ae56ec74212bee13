"""Hierarchical word/character truecasing network.

A bidirectional word-level encoder over hashed n-gram embeddings feeds two
decoders: a word tagger choosing SELF (copy) or OTHER per token, and a
character tagger choosing L/U per character of each OTHER token.  Both
decoders see the token's context vector at every step together with the
embedding of the previous label, so alignment is hard and no attention is
needed.

Training maximizes, per sentence,

    sum_i log P(c_i | c_<i, X) + sum_{i: c_i = OTHER} sum_j log P(y_i^j | y_i^<j, X)

with gold labels fed to both decoders.
"""

from __future__ import annotations

import dataclasses
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import nn
from .corpus import LOWER, OTHER, SELF, Sentence, TrainingExample, case_fold
from .errors import DimensionMismatch
from .features import bag_matrix, word_feature_ids

# row of the label / case embedding tables used before the first decision
START = 2
UNK_CHAR = 0


@dataclass(frozen=True)
class ModelConfig:
    """Network hyper-parameters.  Defaults are the small (student) column."""

    input_embedding_size: int = 128
    output_embedding_size: int = 128
    fwd_encoder_layers: int = 1
    bwd_encoder_layers: int = 1
    decoder_layers: int = 1
    encoder_cells_per_layer: int = 128
    decoder_cells_per_layer: int = 128
    max_ngram_order: int = 3
    ngram_buckets: int = 5000
    beam_size: int = 2
    cell_kind: str = nn.GRU
    dropout_rate: float = 0.25
    char_vocab_size: int = 512
    # characters with their own embedding row, in row order starting at 1
    alphabet: str = ""

    def __post_init__(self):
        sizes = ("input_embedding_size", "output_embedding_size", "fwd_encoder_layers",
                 "bwd_encoder_layers", "decoder_layers", "encoder_cells_per_layer",
                 "decoder_cells_per_layer", "max_ngram_order", "ngram_buckets", "beam_size")
        for name in sizes:
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.cell_kind not in (nn.GRU, nn.LSTM):
            raise ValueError(f"cell_kind must be 'gru' or 'lstm', not {self.cell_kind!r}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.char_vocab_size < 2:
            raise ValueError("char_vocab_size must be >= 2")
        if len(self.alphabet) > self.char_vocab_size - 1:
            raise ValueError("alphabet does not fit in char_vocab_size")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet has repeated characters")

    @classmethod
    def preset(cls, name: str, **overrides) -> "ModelConfig":
        try:
            base = PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
        return dataclasses.replace(base, **overrides)

    def replace(self, **changes) -> "ModelConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d)


PRESETS = {
    "teacher": ModelConfig(
        input_embedding_size=512, output_embedding_size=512,
        fwd_encoder_layers=2, bwd_encoder_layers=2, decoder_layers=2,
        encoder_cells_per_layer=512, decoder_cells_per_layer=512,
        max_ngram_order=3, ngram_buckets=5000, beam_size=2),
    "student": ModelConfig(
        input_embedding_size=128, output_embedding_size=128,
        fwd_encoder_layers=1, bwd_encoder_layers=1, decoder_layers=1,
        encoder_cells_per_layer=128, decoder_cells_per_layer=128,
        max_ngram_order=3, ngram_buckets=5000, beam_size=2),
}


def build_alphabet(sentences: Iterable[Sequence[str]], cap: int = 511) -> str:
    """Characters of the case-folded corpus, most frequent first, at most ``cap``."""
    counts = Counter()
    for sent in sentences:
        for tok in case_fold(sent):
            counts.update(tok)
    ranked = sorted(counts, key=lambda c: (-counts[c], c))
    return "".join(ranked[:cap])


def _stack_specs(kind, n_layers, input_size, hidden):
    return [nn.RnnCellSpec(kind, input_size if k == 0 else hidden, hidden) for k in range(n_layers)]


def parameter_shapes(config: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Name -> shape of every learnable tensor, in canonical order."""
    c = config
    He, Hd, Eo = c.encoder_cells_per_layer, c.decoder_cells_per_layer, c.output_embedding_size
    shapes = {"ngram_embedding": (c.ngram_buckets, c.input_embedding_size)}
    stacks = [
        ("enc_fwd", c.fwd_encoder_layers, c.input_embedding_size, He),
        ("enc_bwd", c.bwd_encoder_layers, c.input_embedding_size, He),
        ("word_dec", c.decoder_layers, 2 * He + Eo, Hd),
        ("char_dec", c.decoder_layers, 2 * He + 2 * Eo, Hd),
    ]
    for name, n, d_in, h in stacks:
        for k, spec in enumerate(_stack_specs(c.cell_kind, n, d_in, h)):
            G = spec.gates
            shapes[f"{name}.{k}.W"] = (spec.input_size, G * h)
            shapes[f"{name}.{k}.U"] = (h, G * h)
            shapes[f"{name}.{k}.b"] = (G * h,)
    shapes["word_label_embedding"] = (3, Eo)
    shapes["word_out.W"] = (Hd, 2)
    shapes["word_out.b"] = (2,)
    shapes["char_embedding"] = (c.char_vocab_size, Eo)
    shapes["case_embedding"] = (3, Eo)
    shapes["char_out.W"] = (Hd, 2)
    shapes["char_out.b"] = (2,)
    return shapes


def init_params(config: ModelConfig, rng: np.random.Generator, dtype=np.float32) -> dict:
    params = {}
    for name, shape in parameter_shapes(config).items():
        if name.endswith(".b"):
            p = np.zeros(shape, dtype=dtype)
            if config.cell_kind == nn.LSTM and name.count(".") == 2:
                H = shape[0] // 4
                p[H:2 * H] = 1.0
        else:
            p = rng.uniform(-nn.INIT_SCALE, nn.INIT_SCALE, size=shape).astype(dtype)
        params[name] = p
    return params


@dataclass
class TruecaserModel:
    config: ModelConfig
    params: dict = field(repr=False)

    @classmethod
    def initialize(cls, config: ModelConfig, seed=0, dtype=np.float32) -> "TruecaserModel":
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        return cls(config, init_params(config, rng, dtype))

    def __post_init__(self):
        expected = parameter_shapes(self.config)
        if set(expected) != set(self.params):
            missing = sorted(set(expected) - set(self.params))
            extra = sorted(set(self.params) - set(expected))
            raise DimensionMismatch(f"parameter names differ; missing {missing}, unexpected {extra}")
        for name, shape in expected.items():
            if tuple(self.params[name].shape) != shape:
                raise DimensionMismatch(f"{name}: expected {shape}, got {self.params[name].shape}")

    @property
    def dtype(self):
        return self.params["ngram_embedding"].dtype

    def copy(self) -> "TruecaserModel":
        return TruecaserModel(self.config, {k: v.copy() for k, v in self.params.items()})

    def astype(self, dtype) -> "TruecaserModel":
        return TruecaserModel(self.config, {k: v.astype(dtype) for k, v in self.params.items()})

    def num_parameters(self) -> int:
        return sum(p.size for p in self.params.values())

    def layers(self, stack: str) -> list[dict]:
        n = {"enc_fwd": self.config.fwd_encoder_layers, "enc_bwd": self.config.bwd_encoder_layers,
             "word_dec": self.config.decoder_layers, "char_dec": self.config.decoder_layers}[stack]
        return [{g: self.params[f"{stack}.{k}.{g}"] for g in "WUb"} for k in range(n)]

    @cached_property
    def _char_rows(self) -> dict[str, int]:
        return {ch: i + 1 for i, ch in enumerate(self.config.alphabet)}

    def char_ids(self, word: str) -> list[int]:
        rows = self._char_rows
        return [rows.get(ch, UNK_CHAR) for ch in word]

    def feature_ids(self, word: str) -> tuple[int, ...]:
        return word_feature_ids(word, self.config.max_ngram_order, self.config.ngram_buckets)


# ---------------------------------------------------------------------------
# batched teacher-forced forward / backward


def _pad_reverse_index(lengths, T):
    """Index that reverses each column within its own length (an involution)."""
    t = np.arange(T)[:, None]
    L = np.asarray(lengths)[None, :]
    return np.where(t < L, L - 1 - t, t)


def _encode(model: TruecaserModel, sentences, training, rng):
    cfg = model.config
    B = len(sentences)
    lengths = [len(s) for s in sentences]
    T = max(lengths)
    words = [sentences[b][t] if t < lengths[b] else None for t in range(T) for b in range(B)]
    bag = bag_matrix(words, cfg.max_ngram_order, cfg.ngram_buckets, model.dtype)
    emb = np.asarray(bag @ model.params["ngram_embedding"]).reshape(T, B, -1)
    rev = _pad_reverse_index(lengths, T)
    cols = np.arange(B)[None, :]
    rate = cfg.dropout_rate
    hf, cache_f = nn.stack_forward(cfg.cell_kind, model.layers("enc_fwd"), emb, rate, training, rng)
    hbr, cache_b = nn.stack_forward(cfg.cell_kind, model.layers("enc_bwd"), emb[rev, cols],
                                    rate, training, rng)
    ctx = np.concatenate([hf, hbr[rev, cols]], axis=-1)
    return ctx, (bag, rev, cols, cache_f, cache_b, T, B)


def _encode_backward(model, dctx, cache, grads):
    bag, rev, cols, cache_f, cache_b, T, B = cache
    kind = model.config.cell_kind
    H = model.config.encoder_cells_per_layer
    demb, gf = nn.stack_backward(kind, model.layers("enc_fwd"), dctx[..., :H], cache_f)
    demb_r, gb = nn.stack_backward(kind, model.layers("enc_bwd"), dctx[..., H:][rev, cols], cache_b)
    demb = demb + demb_r[rev, cols]
    grads["ngram_embedding"] = np.asarray(bag.T @ demb.reshape(T * B, -1))
    _store(grads, "enc_fwd", gf)
    _store(grads, "enc_bwd", gb)


def _store(grads, stack, layer_grads):
    for k, g in enumerate(layer_grads):
        for name, arr in g.items():
            grads[f"{stack}.{k}.{name}"] = arr


def _output_layer(h, W, b):
    logits = h @ W + b
    return nn.log_softmax(logits)


def _output_backward(h, W, logp, gold, mask, prefix, grads):
    """Gradient of ``-sum(mask * logp[gold])`` through the softmax projection."""
    dlogits = np.exp(logp)
    np.put_along_axis(dlogits, gold[..., None],
                      np.take_along_axis(dlogits, gold[..., None], -1) - 1.0, -1)
    dlogits *= mask[..., None]
    flat_h = h.reshape(-1, h.shape[-1])
    flat_d = dlogits.reshape(-1, 2)
    grads[f"{prefix}.W"] = flat_h.T @ flat_d
    grads[f"{prefix}.b"] = flat_d.sum(axis=0)
    return dlogits @ W.T


def batch_loss(model: TruecaserModel, examples: Sequence[TrainingExample], *,
               training=False, rng=None, grad=True):
    """Summed negative log-likelihood of ``examples`` and its gradient.

    Returns ``(loss, grads, per_sentence_loglik)``; ``grads`` is ``None``
    when ``grad`` is false.  The loss is a sum, not a mean, so gradients of
    a union of batches add up.
    """
    if training and model.config.dropout_rate > 0 and rng is None:
        raise ValueError("training with dropout needs an rng")
    cfg = model.config
    P = model.params
    kind = cfg.cell_kind
    rate = cfg.dropout_rate
    dtype = model.dtype
    B = len(examples)
    sentences = [ex.input for ex in examples]
    ctx, enc_cache = _encode(model, sentences, training, rng)
    T = ctx.shape[0]
    He2 = ctx.shape[-1]

    # word-level decoder
    gold = np.zeros((T, B), dtype=np.int64)
    wmask = np.zeros((T, B), dtype=dtype)
    for b, ex in enumerate(examples):
        gold[:len(ex), b] = ex.word_labels
        wmask[:len(ex), b] = 1.0
    prev = np.full((T, B), START, dtype=np.int64)
    prev[1:] = gold[:-1]
    win = np.concatenate([ctx, P["word_label_embedding"][prev]], axis=-1)
    wout, wcache = nn.stack_forward(kind, model.layers("word_dec"), win, rate, training, rng)
    wlogp = _output_layer(wout, P["word_out.W"], P["word_out.b"])
    wll = np.take_along_axis(wlogp, gold[..., None], -1)[..., 0] * wmask
    per_sentence = wll.sum(axis=0).astype(np.float64)

    # character-level decoder over gold OTHER tokens
    slots = [(t, b) for b, ex in enumerate(examples) for t in ex.other_positions]
    N = len(slots)
    if N:
        tok_t = np.array([t for t, _ in slots])
        tok_b = np.array([b for _, b in slots])
        J = max(len(examples[b].input[t]) for t, b in slots)
        chars = np.zeros((J, N), dtype=np.int64)
        cgold = np.full((J, N), LOWER, dtype=np.int64)
        cmask = np.zeros((J, N), dtype=dtype)
        for n, (t, b) in enumerate(slots):
            word = examples[b].input[t]
            m = len(word)
            chars[:m, n] = model.char_ids(word)
            cgold[:m, n] = examples[b].char_labels[t]
            cmask[:m, n] = 1.0
        cprev = np.full((J, N), START, dtype=np.int64)
        cprev[1:] = cgold[:-1]
        ctx_tok = ctx[tok_t, tok_b]
        cin = np.concatenate([np.broadcast_to(ctx_tok, (J, N, He2)),
                              P["char_embedding"][chars], P["case_embedding"][cprev]], axis=-1)
        cout, ccache = nn.stack_forward(kind, model.layers("char_dec"), cin, rate, training, rng)
        clogp = _output_layer(cout, P["char_out.W"], P["char_out.b"])
        cll = np.take_along_axis(clogp, cgold[..., None], -1)[..., 0] * cmask
        np.add.at(per_sentence, tok_b, cll.sum(axis=0))

    loss = -float(per_sentence.sum())
    if not grad:
        return loss, None, per_sentence

    grads = {}
    dctx = np.zeros_like(ctx)
    dwout = _output_backward(wout, P["word_out.W"], wlogp, gold, wmask, "word_out", grads)
    dwin, wg = nn.stack_backward(kind, model.layers("word_dec"), dwout, wcache)
    _store(grads, "word_dec", wg)
    dctx += dwin[..., :He2]
    dlab = np.zeros_like(P["word_label_embedding"])
    np.add.at(dlab, prev.ravel(), dwin[..., He2:].reshape(T * B, -1))
    grads["word_label_embedding"] = dlab

    dchar = np.zeros_like(P["char_embedding"])
    dcase = np.zeros_like(P["case_embedding"])
    if N:
        dcout = _output_backward(cout, P["char_out.W"], clogp, cgold, cmask, "char_out", grads)
        dcin, cg = nn.stack_backward(kind, model.layers("char_dec"), dcout, ccache)
        _store(grads, "char_dec", cg)
        np.add.at(dctx, (tok_t, tok_b), dcin[..., :He2].sum(axis=0))
        Eo = cfg.output_embedding_size
        np.add.at(dchar, chars.ravel(), dcin[..., He2:He2 + Eo].reshape(J * N, -1))
        np.add.at(dcase, cprev.ravel(), dcin[..., He2 + Eo:].reshape(J * N, -1))
    else:
        for name, shape in parameter_shapes(cfg).items():
            if name.startswith("char_dec.") or name.startswith("char_out."):
                grads[name] = np.zeros(shape, dtype=dtype)
    grads["char_embedding"] = dchar
    grads["case_embedding"] = dcase

    _encode_backward(model, dctx, enc_cache, grads)
    return loss, grads, per_sentence


def sentence_log_likelihood(example: TrainingExample, model: TruecaserModel) -> float:
    """Teacher-forced log P(C|X) + sum over gold OTHER words of log P(y_i|X)."""
    _, _, ll = batch_loss(model, [example], training=False, grad=False)
    return float(ll[0])


# ---------------------------------------------------------------------------
# single-sentence building blocks shared with decoding


def encode_context(sentence: Sequence[str], model: TruecaserModel, training=False, rng=None):
    """Context vectors ``(l, 2 * encoder_cells)`` for one case-folded sentence."""
    ctx, _ = _encode(model, [Sentence(sentence)], training, rng)
    return ctx[:, 0]


def word_decoder_step(model: TruecaserModel, ctx_row, prev_labels, states):
    """Advance ``K`` word-decoder hypotheses by one token.

    ``ctx_row`` is the current token's context vector, ``prev_labels`` the
    ``K`` previous labels (``START`` at the first token), ``states`` the
    per-layer recurrent states with a leading ``K`` axis, or ``None``.
    Returns ``(log_probs (K, 2), new_states)``.
    """
    P = model.params
    prev_labels = np.asarray(prev_labels)
    K = len(prev_labels)
    if states is None:
        states = _zero_states(model, K)
    x = np.concatenate([np.broadcast_to(ctx_row, (K, ctx_row.shape[-1])),
                        P["word_label_embedding"][prev_labels]], axis=-1)
    h, new_states = nn.stack_step(model.config.cell_kind, model.layers("word_dec"), x, states)
    return _output_layer(h, P["word_out.W"], P["word_out.b"]), new_states


def char_decoder_step(model: TruecaserModel, ctx_row, char_id, prev_cases, states):
    P = model.params
    prev_cases = np.asarray(prev_cases)
    K = len(prev_cases)
    if states is None:
        states = _zero_states(model, K)
    x = np.concatenate([np.broadcast_to(ctx_row, (K, ctx_row.shape[-1])),
                        np.broadcast_to(P["char_embedding"][char_id], (K, model.config.output_embedding_size)),
                        P["case_embedding"][prev_cases]], axis=-1)
    h, new_states = nn.stack_step(model.config.cell_kind, model.layers("char_dec"), x, states)
    return _output_layer(h, P["char_out.W"], P["char_out.b"]), new_states


def _zero_states(model, K):
    cfg = model.config
    return [nn.zero_state(cfg.cell_kind, K, cfg.decoder_cells_per_layer, model.dtype)
            for _ in range(cfg.decoder_layers)]


def word_label_log_probs(ctx, labels, model: TruecaserModel):
    """Teacher-forced word-label log-probabilities.

    Step ``i`` conditions on ``labels[:i]``.  Returns one row per step for
    ``min(len(labels) + 1, len(ctx))`` steps.
    """
    steps = min(len(labels) + 1, len(ctx))
    out = np.empty((steps, 2), dtype=model.dtype)
    states = None
    prev = START
    for i in range(steps):
        logp, states = word_decoder_step(model, ctx[i], [prev], states)
        out[i] = logp[0]
        if i < len(labels):
            prev = labels[i]
    return out


def char_case_log_probs(ctx_row, word: str, cases, model: TruecaserModel):
    """Teacher-forced L/U log-probabilities for the characters of ``word``."""
    steps = min(len(cases) + 1, len(word))
    ids = model.char_ids(word)
    out = np.empty((steps, 2), dtype=model.dtype)
    states = None
    prev = START
    for j in range(steps):
        logp, states = char_decoder_step(model, ctx_row, ids[j], [prev], states)
        out[j] = logp[0]
        if j < len(cases):
            prev = cases[j]
    return out


__all__ = [
    "ModelConfig", "PRESETS", "TruecaserModel", "build_alphabet", "parameter_shapes",
    "init_params", "batch_loss", "sentence_log_likelihood", "encode_context",
    "word_label_log_probs", "char_case_log_probs", "word_decoder_step", "char_decoder_step",
    "START", "SELF", "OTHER",
]
