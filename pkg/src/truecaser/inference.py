"""Beam-search decoding and gated composition of word and character outputs."""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, Sequence

import numpy as np

from .corpus import LOWER, OTHER, SELF, UPPER, Sentence, apply_char_labels, can_upper, case_fold
from .model import START, TruecaserModel, char_decoder_step, encode_context, word_decoder_step


@dataclass
class Hypothesis:
    labels: tuple[int, ...]
    log_prob: float
    decoder_state: Any = None


def _take(state, idx):
    if state is None:
        return None
    if isinstance(state, np.ndarray):
        return state[idx]
    if isinstance(state, tuple):
        return tuple(_take(s, idx) for s in state)
    return [_take(s, idx) for s in state]


StepFn = Callable[[int, np.ndarray, Any], tuple[np.ndarray, Any]]


def beam_search_labels(step_fn: StepFn, steps: int, beam: int, init_state=None) -> list[Hypothesis]:
    """Beam search over binary label sequences.

    ``step_fn(t, prev_labels, states)`` scores ``K`` live hypotheses at step
    ``t``: ``prev_labels`` holds their last labels (``START`` at ``t == 0``)
    and ``states`` their stacked decoder states.  It returns ``(K, 2)``
    log-probabilities (``-inf`` disallows a label) and the advanced states.

    Candidates are ranked by total log-probability with a stable sort, so at
    equal scores the older hypothesis and then label 0 win.  No length
    normalization.  Returns the final beam, best first.
    """
    if beam < 1 or steps < 1:
        raise ValueError("beam and steps must be >= 1")
    labels = [()]
    scores = np.zeros(1)
    prev = np.array([START])
    states = init_state
    for t in range(steps):
        logp, new_states = step_fn(t, prev, states)
        logp = np.asarray(logp, dtype=np.float64)
        cand = (scores[:, None] + logp).ravel()
        order = np.argsort(-cand, kind="stable")
        order = order[np.isfinite(cand[order])][:beam]
        parents, labs = np.divmod(order, 2)
        labels = [labels[p] + (int(c),) for p, c in zip(parents, labs)]
        scores = cand[order]
        prev = labs
        states = _take(new_states, parents)
    return [Hypothesis(labels[k], float(scores[k]), _take(states, np.array([k])))
            for k in range(len(labels))]


@dataclass
class Decoding:
    tokens: Sentence
    word_labels: tuple[int, ...]
    # per-token U/L labels (None for SELF tokens)
    char_labels: tuple[tuple[int, ...] | None, ...]
    log_prob: float


def decode_word_cases(model: TruecaserModel, ctx_row, word: str, beam: int):
    """Best (cases, log_prob) for one OTHER word.  Caseless characters stay L."""
    ids = model.char_ids(word)
    allow_upper = [can_upper(ch) for ch in word]

    def step(j, prev, states):
        logp, new_states = char_decoder_step(model, ctx_row, ids[j], prev, states)
        if not allow_upper[j]:
            logp = logp.astype(np.float64)
            logp[:, UPPER] = -np.inf
        return logp, new_states

    best = beam_search_labels(step, len(word), beam)[0]
    return best.labels, best.log_prob


def decode_sentence(model: TruecaserModel, sentence: Sequence[str], *, use_full_beam=False,
                    beam: int | None = None) -> Decoding:
    x = case_fold(sentence)
    beam = model.config.beam_size if beam is None else beam
    ctx = encode_context(x, model)

    def word_step(t, prev, states):
        return word_decoder_step(model, ctx[t], prev, states)

    hyps = beam_search_labels(word_step, len(x), beam)
    if not use_full_beam:
        hyps = hyps[:1]

    cache = {}

    def cases_for(i):
        if i not in cache:
            cache[i] = decode_word_cases(model, ctx[i], x[i], beam)
        return cache[i]

    best = None
    for hyp in hyps:
        score = hyp.log_prob
        chars = []
        for i, c in enumerate(hyp.labels):
            if c == OTHER:
                cases, lp = cases_for(i)
                score += lp
                chars.append(cases)
            else:
                chars.append(None)
        if best is None or score > best[0]:
            best = (score, hyp.labels, tuple(chars))
    score, labels, chars = best
    tokens = Sentence(tok if c == SELF else apply_char_labels(tok, cs)
                      for tok, c, cs in zip(x, labels, chars))
    return Decoding(tokens, labels, chars, score)


def truecase_sentence(sentence: Sequence[str], model: TruecaserModel, *, use_full_beam=False) -> Sentence:
    return decode_sentence(model, sentence, use_full_beam=use_full_beam).tokens


def truecase_with_prefix(sentence: Sequence[str], prefix: Sequence[str], model: TruecaserModel, *,
                         use_full_beam=False) -> Sentence:
    """Decode ``prefix + sentence`` as one sentence and drop the prefix tokens."""
    prefix = list(prefix)
    if not prefix:
        raise ValueError("prefix must be non-empty")
    out = truecase_sentence(prefix + list(sentence), model, use_full_beam=use_full_beam)
    return Sentence(out[len(prefix):])


def truecase(sentence: Sequence[str], model: TruecaserModel, *, prefix: Sequence[str] | None = None,
             use_full_beam=False) -> Sentence:
    if prefix:
        return truecase_with_prefix(sentence, prefix, model, use_full_beam=use_full_beam)
    return truecase_sentence(sentence, model, use_full_beam=use_full_beam)


def worker_count(default: int | None = None) -> int:
    """Worker pool size from ``TRUECASE_THREADS``, else machine parallelism."""
    env = os.environ.get("TRUECASE_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("TRUECASE_THREADS must be >= 1")
        return n
    return default or os.cpu_count() or 1


def truecase_stream(sentences: Iterable[Sequence[str]], model: TruecaserModel, *,
                    prefix: Sequence[str] | None = None, use_full_beam=False,
                    workers: int | None = None) -> Iterator[Sentence]:
    """Truecase a stream of sentences, yielding results in input order."""
    def work(sent):
        return truecase(sent, model, prefix=prefix, use_full_beam=use_full_beam)

    workers = worker_count() if workers is None else workers
    if workers <= 1:
        yield from map(work, sentences)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # bounded window keeps memory flat on long streams
        window = deque()
        for sent in sentences:
            window.append(pool.submit(work, sent))
            if len(window) >= 4 * workers:
                yield window.popleft().result()
        while window:
            yield window.popleft().result()
