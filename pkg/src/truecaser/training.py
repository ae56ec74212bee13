"""Mini-batch SGD training with dev-set early stopping."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import nn
from .corpus import TrainingExample, derive_labels
from .errors import EmptyCorpus, NonFiniteLoss
from .inference import decode_sentence
from .model import ModelConfig, TruecaserModel, batch_loss, build_alphabet, init_params

log = logging.getLogger(__name__)


@dataclass
class TrainOptions:
    epochs: int = 10
    lr: float = 0.03
    batch: int = 32
    seed: int = 0
    clip: float | None = 5.0
    # epochs without dev improvement before stopping; None disables
    patience: int | None = 3

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.lr < 0:
            raise ValueError("lr must be >= 0")
        if self.batch < 1:
            raise ValueError("batch must be >= 1")
        if self.patience is not None and self.patience < 1:
            raise ValueError("patience must be >= 1")


@dataclass
class EpochRecord:
    epoch: int
    mean_loss: float
    dev_sentence_error_rate: float | None = None
    best_dev_sentence_error_rate: float | None = None


@dataclass
class TrainResult:
    model: TruecaserModel
    history: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0


def as_examples(data: Iterable) -> list[TrainingExample]:
    out = []
    for item in data:
        out.append(item if isinstance(item, TrainingExample) else derive_labels(item))
    return out


def sentence_error_rate(model: TruecaserModel, references: Sequence[Sequence[str]], **decode_kw) -> float:
    """Fraction of reference sentences not reproduced exactly from their folded form."""
    if not references:
        return 0.0
    wrong = sum(tuple(decode_sentence(model, ref, **decode_kw).tokens) != tuple(ref)
                for ref in references)
    return wrong / len(references)


def train(corpus, config: ModelConfig, options: TrainOptions | None = None, *,
          dev=None, init: TruecaserModel | None = None, callback=None) -> TrainResult:
    """Minimize the mean per-sentence negative log-likelihood with SGD.

    ``corpus`` and ``dev`` hold cased sentences or prepared examples.  With
    a dev set the parameters of the epoch with the lowest dev sentence error
    rate are returned, and training stops after ``patience`` epochs without
    improvement.  An empty ``config.alphabet`` is filled from the corpus.
    """
    options = options or TrainOptions()
    examples = as_examples(corpus)
    if not examples:
        raise EmptyCorpus("training corpus is empty")
    dev_refs = [ex.reference for ex in as_examples(dev)] if dev is not None else None

    rng = np.random.default_rng(options.seed)
    if init is not None:
        model = init.copy()
    else:
        if not config.alphabet:
            config = config.replace(
                alphabet=build_alphabet((ex.reference for ex in examples), config.char_vocab_size - 1))
        model = TruecaserModel(config, init_params(config, rng))

    result = TrainResult(model.copy())
    best_ser = math.inf
    stale = 0
    n = len(examples)
    for epoch in range(1, options.epochs + 1):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, options.batch):
            batch = [examples[i] for i in order[start:start + options.batch]]
            loss, grads, _ = batch_loss(model, batch, training=True, rng=rng)
            if not math.isfinite(loss):
                raise NonFiniteLoss(f"epoch {epoch}, batch starting at {start}: loss {loss}")
            scale = model.dtype.type(1.0 / len(batch))
            grads = {k: g * scale for k, g in grads.items()}
            if not all(np.isfinite(g).all() for g in grads.values()):
                bad = sorted(k for k, g in grads.items() if not np.isfinite(g).all())
                raise NonFiniteLoss(f"epoch {epoch}: non-finite gradients in {bad}")
            nn.sgd_step(model.params, grads, options.lr, options.clip)
            total += loss
        record = EpochRecord(epoch, total / n)
        if dev_refs is not None:
            ser = sentence_error_rate(model, dev_refs)
            record.dev_sentence_error_rate = ser
            if ser < best_ser:
                best_ser = ser
                stale = 0
                result.model = model.copy()
                result.best_epoch = epoch
            else:
                stale += 1
            record.best_dev_sentence_error_rate = best_ser
        else:
            result.model = model.copy()
            result.best_epoch = epoch
        result.history.append(record)
        log.info("epoch %d  loss %.4f  dev_ser %s", epoch, record.mean_loss,
                 "n/a" if record.dev_sentence_error_rate is None
                 else f"{record.dev_sentence_error_rate:.4f}")
        if callback is not None:
            callback(record, model)
        if dev_refs is not None and options.patience is not None and stale >= options.patience:
            log.info("early stop: no dev improvement for %d epochs", stale)
            break
    return result


def word_label_accuracy(model: TruecaserModel, data) -> float:
    """Share of tokens whose decoded SELF/OTHER label matches the gold one."""
    examples = as_examples(data)
    right = total = 0
    for ex in examples:
        got = decode_sentence(model, ex.input).word_labels
        right += sum(a == b for a, b in zip(got, ex.word_labels))
        total += len(ex)
    return right / total if total else 1.0


__all__ = ["TrainOptions", "TrainResult", "EpochRecord", "train", "sentence_error_rate",
           "word_label_accuracy", "as_examples"]
