"""Non-lowercase precision/recall/F1, first-word accuracy and per-class accuracy.

A token is *non-lowercase* (NL) when it differs from its case-folded form.
Precision is correct NL predictions over NL predictions, recall is correct
NL predictions over NL references; a prediction is correct only when it
matches the reference token exactly.

Zero denominators: no predictions but some references gives precision 0;
no references but some predictions gives recall 0; neither gives
precision = recall = F1 = 1.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .corpus import WordClass, case_fold_token, classify_word_class
from .errors import LengthMismatch, TokenMismatch

ZERO_DENOMINATOR_CONVENTION = (
    "precision=0 if no NL predictions (but NL references exist); "
    "recall=0 if no NL references (but NL predictions exist); "
    "precision=recall=f1=1 if neither exists")


@dataclass
class ClassStats:
    count: int = 0
    correct: int = 0

    @property
    def accuracy(self) -> float | None:
        return self.correct / self.count if self.count else None


@dataclass
class MetricsReport:
    nl_predictions: int
    nl_references: int
    nl_correct: int
    precision: float
    recall: float
    f1: float
    first_word_accuracy: float
    sentences: int
    tokens: int
    per_class: dict[str, ClassStats] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_class"] = {k: {"count": v.count, "correct": v.correct, "accuracy": v.accuracy}
                          for k, v in self.per_class.items()}
        d["zero_denominator_convention"] = ZERO_DENOMINATOR_CONVENTION
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def format_table(self) -> str:
        lines = [
            f"{'sentences':<22}{self.sentences:>10}",
            f"{'tokens':<22}{self.tokens:>10}",
            f"{'NL predictions':<22}{self.nl_predictions:>10}",
            f"{'NL references':<22}{self.nl_references:>10}",
            f"{'NL correct':<22}{self.nl_correct:>10}",
            f"{'precision':<22}{100 * self.precision:>10.2f}",
            f"{'recall':<22}{100 * self.recall:>10.2f}",
            f"{'F1':<22}{100 * self.f1:>10.2f}",
            f"{'first-word accuracy':<22}{100 * self.first_word_accuracy:>10.2f}",
        ]
        for name, st in self.per_class.items():
            acc = "-" if st.accuracy is None else f"{100 * st.accuracy:.2f}"
            lines.append(f"{'class ' + name:<22}{st.count:>10}{acc:>10}")
        return "\n".join(lines)


def prf(correct: int, predictions: int, references: int) -> tuple[float, float, float]:
    if predictions == 0 and references == 0:
        return 1.0, 1.0, 1.0
    p = correct / predictions if predictions else 0.0
    r = correct / references if references else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def _is_nl(token: str) -> bool:
    return case_fold_token(token) != token


def _pairs(hyp: Iterable[Sequence[str]], ref: Iterable[Sequence[str]]):
    """Yield aligned ``(line, hyp_tokens, ref_tokens)``, validating alignment."""
    hyp_it, ref_it = iter(hyp), iter(ref)
    line = 0
    while True:
        h = next(hyp_it, None)
        r = next(ref_it, None)
        line += 1
        if h is None and r is None:
            return
        if h is None or r is None:
            side = "hypothesis" if h is None else "reference"
            raise LengthMismatch(line, f"{side} corpus ends early")
        if len(h) != len(r):
            raise LengthMismatch(line, f"{len(h)} hypothesis tokens vs {len(r)} reference tokens")
        for pos, (a, b) in enumerate(zip(h, r)):
            if case_fold_token(a) != case_fold_token(b):
                raise TokenMismatch(line, pos, a, b)
        yield line, h, r


def score(hyp: Iterable[Sequence[str]], ref: Iterable[Sequence[str]]) -> MetricsReport:
    n_pred = n_ref = n_ok = 0
    sentences = tokens = first_ok = 0
    per_class = {c.value: ClassStats() for c in WordClass}
    for _, h, r in _pairs(hyp, ref):
        sentences += 1
        tokens += len(r)
        first_ok += h[0] == r[0]
        for a, b in zip(h, r):
            pa, pb = _is_nl(a), _is_nl(b)
            n_pred += pa
            n_ref += pb
            n_ok += pa and a == b
            st = per_class[classify_word_class(b).value]
            st.count += 1
            st.correct += a == b
    p, r_, f = prf(n_ok, n_pred, n_ref)
    return MetricsReport(n_pred, n_ref, n_ok, p, r_, f,
                         first_ok / sentences if sentences else 1.0,
                         sentences, tokens, per_class)


def first_word_accuracy(hyp, ref) -> float:
    return score(hyp, ref).first_word_accuracy


def per_class_report(hyp, ref) -> dict[str, ClassStats]:
    return score(hyp, ref).per_class
