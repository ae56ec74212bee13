"""Corpus handling: tokenization, case folding, training targets, word classes.

Only simple one-to-one case mappings are honoured.  A character whose
lower/upper counterpart is more than one code point, or whose mapping does
not round-trip (``ß``, ``İ``, the Kelvin sign, titlecase digraphs), is
treated as caseless.  That keeps every transformation length preserving so
character labels line up with input characters.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import EmptyLine, MalformedLine

SELF = 0
OTHER = 1
# character case labels; L sorts first so it wins ties in beam search
LOWER = 0
UPPER = 1


class WordClass(str, enum.Enum):
    LC = "LC"
    UC = "UC"
    CA = "CA"
    MC = "MC"


@lru_cache(maxsize=65536)
def fold_char(c: str) -> str:
    low = c.lower()
    if len(low) == 1 and low != c and low.upper() == c:
        return low
    return c


@lru_cache(maxsize=65536)
def upper_char(c: str) -> str:
    """Uppercase ``c`` through a 1:1 round-tripping mapping, else return it."""
    up = c.upper()
    if len(up) == 1 and up != c and up.lower() == c:
        return up
    return c


def is_upper(c: str) -> bool:
    return fold_char(c) != c


def can_upper(c: str) -> bool:
    return upper_char(c) != c


def is_cased(c: str) -> bool:
    return is_upper(c) or can_upper(c)


class Sentence(tuple):
    """An immutable, non-empty sequence of whitespace-free tokens."""

    def __new__(cls, tokens: Iterable[str]):
        tokens = tuple(tokens)
        if not tokens:
            raise EmptyLine("a sentence needs at least one token")
        for tok in tokens:
            if not isinstance(tok, str) or not tok or any(ch.isspace() for ch in tok):
                raise ValueError(f"invalid token {tok!r}")
        return super().__new__(cls, tokens)

    @property
    def tokens(self) -> tuple[str, ...]:
        return tuple(self)

    def __repr__(self):
        return f"Sentence({list(self)!r})"

    def __str__(self):
        return " ".join(self)


@dataclass(frozen=True)
class TrainingExample:
    input: Sentence
    reference: Sentence
    word_labels: tuple[int, ...]
    # None for SELF tokens, a tuple of LOWER/UPPER for OTHER tokens
    char_labels: tuple[tuple[int, ...] | None, ...]

    def __len__(self):
        return len(self.input)

    @property
    def other_positions(self) -> list[int]:
        return [i for i, c in enumerate(self.word_labels) if c == OTHER]


def tokenize(line: str) -> Sentence:
    tokens = line.split()
    if not tokens:
        raise EmptyLine("line contains no tokens")
    return Sentence(tokens)


def case_fold_token(token: str) -> str:
    return "".join(fold_char(c) for c in token)


def case_fold(sentence: Sequence[str]) -> Sentence:
    return Sentence(case_fold_token(t) for t in sentence)


def apply_char_labels(token: str, labels: Sequence[int]) -> str:
    if len(labels) != len(token):
        raise ValueError(f"{len(labels)} case labels for {len(token)} characters")
    return "".join(upper_char(c) if lab == UPPER else c for c, lab in zip(token, labels))


def derive_labels(reference: Sequence[str]) -> TrainingExample:
    reference = Sentence(reference)
    folded = []
    word_labels = []
    char_labels = []
    for tok in reference:
        low = case_fold_token(tok)
        folded.append(low)
        if low == tok:
            word_labels.append(SELF)
            char_labels.append(None)
        else:
            word_labels.append(OTHER)
            char_labels.append(tuple(UPPER if a != b else LOWER for a, b in zip(tok, low)))
    return TrainingExample(Sentence(folded), reference, tuple(word_labels), tuple(char_labels))


def reconstruct(example: TrainingExample) -> Sentence:
    """Re-apply the labels of ``example`` to its input."""
    out = []
    for tok, c, chars in zip(example.input, example.word_labels, example.char_labels):
        out.append(tok if c == SELF else apply_char_labels(tok, chars))
    return Sentence(out)


def classify_word_class(token: str) -> WordClass:
    cased = [c for c in token if is_cased(c)]
    upper = [is_upper(c) for c in cased]
    if not any(upper):
        return WordClass.LC
    if all(upper):
        return WordClass.CA
    if upper[0] and not any(upper[1:]):
        return WordClass.UC
    return WordClass.MC


def iter_corpus(lines: Iterable[str], start: int = 1) -> Iterator[Sentence]:
    for lineno, line in enumerate(lines, start):
        line = line.rstrip("\n")
        tokens = line.split()
        if not tokens:
            raise MalformedLine(lineno)
        yield Sentence(tokens)


def read_corpus(path: str | Path) -> Iterator[Sentence]:
    """Stream sentences from a UTF-8 file with one tokenized sentence per line."""
    with open(path, encoding="utf-8", newline="\n") as fh:
        yield from iter_corpus(fh)


def write_corpus(sentences: Iterable[Sequence[str]], path: str | Path | io.TextIOBase) -> int:
    if hasattr(path, "write"):
        return _write_lines(sentences, path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        return _write_lines(sentences, fh)


def _write_lines(sentences, fh) -> int:
    n = 0
    for sent in sentences:
        fh.write(" ".join(sent))
        fh.write("\n")
        n += 1
    return n


def load_examples(path: str | Path) -> list[TrainingExample]:
    return [derive_labels(s) for s in read_corpus(path)]
