"""Slow float64 reference implementation of the network's scoring.

Written against the raw parameter tensors with scalar-style loops and its
own cell equations, so it shares no forward code with the package.  Used
to check teacher-forced likelihoods and exhaustive-search decoding.
"""

import itertools
import math

import numpy as np

from truecaser.features import extract_char_ngrams, hash_feature

SELF, OTHER, START = 0, 1, 2
L, U = 0, 1


def _sig(v):
    return np.array([1.0 / (1.0 + math.exp(-a)) for a in v])


def _cell(kind, p, x, state):
    W, Uh, b = (np.asarray(p[k], dtype=np.float64) for k in ("W", "U", "b"))
    H = Uh.shape[0]
    if kind == "gru":
        h = state
        r = _sig(x @ W[:, :H] + h @ Uh[:, :H] + b[:H])
        z = _sig(x @ W[:, H:2 * H] + h @ Uh[:, H:2 * H] + b[H:2 * H])
        n = np.tanh(x @ W[:, 2 * H:] + (r * h) @ Uh[:, 2 * H:] + b[2 * H:])
        h = (1.0 - z) * n + z * h
        return h, h
    h, c = state
    a = x @ W + h @ Uh + b
    i, f, g, o = _sig(a[:H]), _sig(a[H:2 * H]), np.tanh(a[2 * H:3 * H]), _sig(a[3 * H:])
    c = f * c + i * g
    h = o * np.tanh(c)
    return h, (h, c)


def _zero(kind, H):
    return np.zeros(H) if kind == "gru" else (np.zeros(H), np.zeros(H))


def _run_stack(model, stack, inputs):
    cfg = model.config
    n = {"enc_fwd": cfg.fwd_encoder_layers, "enc_bwd": cfg.bwd_encoder_layers}[stack]
    seq = inputs
    for k in range(n):
        p = {g: model.params[f"{stack}.{k}.{g}"] for g in "WUb"}
        state = _zero(cfg.cell_kind, p["U"].shape[0])
        out = []
        for x in seq:
            h, state = _cell(cfg.cell_kind, p, x, state)
            out.append(h)
        seq = out
    return seq


def embed(model, word):
    table = np.asarray(model.params["ngram_embedding"], dtype=np.float64)
    v = np.zeros(table.shape[1])
    for g in extract_char_ngrams(word, model.config.max_ngram_order):
        v = v + table[hash_feature(g, table.shape[0])]
    return v


def context(model, words):
    embs = [embed(model, w) for w in words]
    fwd = _run_stack(model, "enc_fwd", embs)
    bwd = _run_stack(model, "enc_bwd", embs[::-1])[::-1]
    return [np.concatenate([f, b]) for f, b in zip(fwd, bwd)]


def _decoder_logprobs(model, stack, inputs):
    cfg = model.config
    states = [_zero(cfg.cell_kind, cfg.decoder_cells_per_layer) for _ in range(cfg.decoder_layers)]
    prefix = "word_out" if stack == "word_dec" else "char_out"
    W = np.asarray(model.params[f"{prefix}.W"], dtype=np.float64)
    b = np.asarray(model.params[f"{prefix}.b"], dtype=np.float64)
    out = []
    for x in inputs:
        h = x
        for k in range(cfg.decoder_layers):
            p = {g: model.params[f"{stack}.{k}.{g}"] for g in "WUb"}
            h, states[k] = _cell(cfg.cell_kind, p, h, states[k])
        logits = h @ W + b
        m = logits.max()
        out.append(logits - m - math.log(np.exp(logits - m).sum()))
    return out


def word_score(model, ctx, labels):
    emb = np.asarray(model.params["word_label_embedding"], dtype=np.float64)
    prev = [START] + list(labels[:-1])
    inputs = [np.concatenate([c, emb[p]]) for c, p in zip(ctx, prev)]
    lps = _decoder_logprobs(model, "word_dec", inputs)
    return sum(lp[c] for lp, c in zip(lps, labels))


def char_score(model, ctx_row, word, cases):
    cemb = np.asarray(model.params["char_embedding"], dtype=np.float64)
    kemb = np.asarray(model.params["case_embedding"], dtype=np.float64)
    rows = {ch: i + 1 for i, ch in enumerate(model.config.alphabet)}
    prev = [START] + list(cases[:-1])
    inputs = [np.concatenate([ctx_row, cemb[rows.get(ch, 0)], kemb[p]])
              for ch, p in zip(word, prev)]
    lps = _decoder_logprobs(model, "char_dec", inputs)
    return sum(lp[y] for lp, y in zip(lps, cases))


def log_likelihood(model, example):
    ctx = context(model, example.input)
    total = word_score(model, ctx, example.word_labels)
    for i, c in enumerate(example.word_labels):
        if c == OTHER:
            total += char_score(model, ctx[i], example.input[i], example.char_labels[i])
    return total


def exhaustive_decode(model, words, can_upper):
    """Joint argmax over every word-label sequence and every case pattern.

    Returns ``(tokens, score)``.  Characters that cannot be uppercased are
    pinned to L, as in the decoder.
    """
    ctx = context(model, words)
    best_word = []
    for i, w in enumerate(words):
        choices = [(L, U) if can_upper(ch) else (L,) for ch in w]
        scored = [(char_score(model, ctx[i], w, pat), pat) for pat in itertools.product(*choices)]
        best_word.append(max(scored, key=lambda t: t[0]))
    best = None
    for labels in itertools.product((SELF, OTHER), repeat=len(words)):
        s = word_score(model, ctx, labels)
        toks = []
        for i, (w, c) in enumerate(zip(words, labels)):
            if c == OTHER:
                s += best_word[i][0]
                pat = best_word[i][1]
                toks.append("".join(ch.upper() if y == U else ch for ch, y in zip(w, pat)))
            else:
                toks.append(w)
        if best is None or s > best[1]:
            best = (toks, s, labels)
    return best


def exhaustive_word_labels(model, words):
    ctx = context(model, words)
    return max(((labels, word_score(model, ctx, labels))
                for labels in itertools.product((SELF, OTHER), repeat=len(words))),
               key=lambda t: t[1])
