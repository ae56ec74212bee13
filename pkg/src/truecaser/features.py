"""Hashed character n-gram word representation."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch

# Word boundary marker.  Real symbols are single code points, so a three
# character string can never collide with corpus text.  It hashes as the
# byte 0xFF, which never occurs in UTF-8.
BOUNDARY = "<s>"

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def extract_char_ngrams(word: str, max_n: int = 3) -> list[tuple[str, ...]]:
    """All n-grams (1 <= n <= max_n) of the boundary-padded word.

    Each n-gram is a tuple of symbols; n-grams made only of boundary
    symbols are dropped.  Duplicates are kept, in order of n then position.
    """
    if not word:
        raise ValueError("empty word")
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    padded = (BOUNDARY, *word, BOUNDARY)
    grams = []
    for n in range(1, max_n + 1):
        for i in range(len(padded) - n + 1):
            g = padded[i:i + n]
            if all(s == BOUNDARY for s in g):
                continue
            grams.append(g)
    return grams


def ngram_text(gram: tuple[str, ...]) -> str:
    return "".join(gram)


def ngram_bytes(gram) -> bytes:
    if isinstance(gram, str):
        return gram.encode("utf-8")
    return b"".join(b"\xff" if s == BOUNDARY else s.encode("utf-8") for s in gram)


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & _MASK64
    return h


def hash_feature(gram, buckets: int) -> int:
    """FNV-1a (64 bit) of the n-gram's bytes, modulo ``buckets``.

    ``gram`` is either an n-gram tuple from :func:`extract_char_ngrams` or a
    plain string without boundary symbols.
    """
    if buckets < 1:
        raise ValueError("buckets must be >= 1")
    return fnv1a_64(ngram_bytes(gram)) % buckets


@lru_cache(maxsize=200_000)
def word_feature_ids(word: str, max_n: int = 3, buckets: int = 5000) -> tuple[int, ...]:
    return tuple(hash_feature(g, buckets) for g in extract_char_ngrams(word, max_n))


def embed_word(word: str, table: np.ndarray, max_n: int = 3) -> np.ndarray:
    """Sum of the table rows of the word's hashed n-grams (repeats count)."""
    if table.ndim != 2:
        raise DimensionMismatch(f"embedding table must be 2-D, got shape {table.shape}")
    ids = word_feature_ids(word, max_n, table.shape[0])
    out = np.zeros(table.shape[1], dtype=table.dtype)
    for i in ids:
        out += table[i]
    return out


def bag_matrix(words, max_n: int, buckets: int, dtype=np.float32) -> sp.csr_matrix:
    """Sparse count matrix: row k holds the n-gram id counts of ``words[k]``.

    ``None`` entries give empty rows (padding).  ``bag @ table`` embeds all
    words at once and ``bag.T @ grad`` scatters gradients back.
    """
    indptr = [0]
    indices = []
    for w in words:
        if w is not None:
            indices.extend(word_feature_ids(w, max_n, buckets))
        indptr.append(len(indices))
    data = np.ones(len(indices), dtype=dtype)
    m = sp.csr_matrix((data, np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
                      shape=(len(words), buckets))
    m.sum_duplicates()
    return m
