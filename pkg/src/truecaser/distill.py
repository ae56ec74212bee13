"""Prefix sequence distillation.

A teacher trained on positionally capitalized text re-cases the training
corpus with a vacuous prefix (``so ,`` by default) in front of every
sentence; the prefix is stripped from the output.  Because no corpus word
sits in sentence-initial position while the teacher decodes, the
regenerated targets carry only intrinsic capitalization, and a student
trained on them learns position-invariant casing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .corpus import Sentence, case_fold, read_corpus, tokenize, write_corpus
from .inference import truecase_stream
from .model import ModelConfig, TruecaserModel
from .serialize import load_model
from .training import TrainOptions, TrainResult, train

DEFAULT_PREFIX = ("so", ",")
LONG_PREFIX = ("it", "is", "known", "that")


def parse_prefix(text: str) -> Sentence:
    return tokenize(text)


@dataclass
class DistillJob:
    teacher: TruecaserModel
    source: str | Path
    output: str | Path | None = None
    prefix: Sequence[str] = field(default=DEFAULT_PREFIX)

    def __post_init__(self):
        self.prefix = Sentence(self.prefix)
        if isinstance(self.teacher, (str, Path)):
            self.teacher = load_model(self.teacher)


def distill_sentences(teacher: TruecaserModel, sentences: Iterable[Sequence[str]],
                      prefix: Sequence[str] = DEFAULT_PREFIX, workers: int | None = None,
                      ) -> Iterator[Sentence]:
    """Teacher outputs for the case-folded ``sentences``, prefix stripped, in order."""
    prefix = Sentence(prefix)
    folded = (case_fold(s) for s in sentences)
    for out in truecase_stream(folded, teacher, prefix=prefix, workers=workers):
        yield out


def generate_student_corpus(job: DistillJob, workers: int | None = None) -> list[Sentence]:
    """Regenerate ``job.source`` through the teacher; writes ``job.output`` if set."""
    out = list(distill_sentences(job.teacher, read_corpus(job.source), job.prefix, workers))
    if job.output is not None:
        write_corpus(out, job.output)
    return out


def distill_train(teacher: TruecaserModel, source, student_config: ModelConfig | None = None,
                  options: TrainOptions | None = None, *, prefix: Sequence[str] = DEFAULT_PREFIX,
                  dev=None, workers: int | None = None) -> tuple[TrainResult, list[Sentence]]:
    """Single-round distillation: regenerate the corpus, then train a student on it.

    ``source`` is a corpus path or an iterable of sentences.  Returns the
    training result and the regenerated corpus.
    """
    sentences = read_corpus(source) if isinstance(source, (str, Path)) else source
    regenerated = list(distill_sentences(teacher, sentences, prefix, workers))
    student_config = student_config or ModelConfig.preset("student")
    result = train(regenerated, student_config, options, dev=dev)
    return result, regenerated
