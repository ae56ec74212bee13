"""Small synthetic corpora with known casing, for tests and demos."""

from __future__ import annotations

import numpy as np

from .corpus import Sentence, case_fold_token, upper_char

COMMON = (
    "the a of and to in is was for on with as by at from that it this which "
    "are be has have had new city team company phone store music book year "
    "people after before during first last many most some other good great "
    "small large old young local public apples pears nutritious fresh red "
    "green market bought sold likes visited opened built released announced "
    "said says into over under near about across"
).split()

# intrinsically cased words: proper nouns (UC), acronyms (CA), mixed case (MC)
ENTITIES = (
    "Paris", "London", "Berlin", "Apple", "Google", "Monday", "January", "Alice",
    "NASA", "IBM", "BBC", "USA",
    "iPhone", "McDonald's", "Hewlett-Packard", "eBay", "LiveMint", "WebOS", "YouTube", "LaTeX",
)

PUNCT = (",", ".", "2009", "15")


def capitalize_first(token: str) -> str:
    """Positional capitalization: uppercase the first cased character only."""
    for i, ch in enumerate(token):
        up = upper_char(ch)
        if up != ch:
            return token[:i] + up + token[i + 1:]
        if case_fold_token(ch) != ch:
            return token
    return token


def _sentence(rng, entity_rate, first_entity_rate):
    n = int(rng.integers(3, 9))
    toks = []
    for i in range(n):
        p_ent = first_entity_rate if i == 0 else entity_rate
        r = rng.random()
        if r < p_ent:
            toks.append(ENTITIES[rng.integers(len(ENTITIES))])
        elif i > 0 and r < p_ent + 0.08:
            toks.append(PUNCT[rng.integers(len(PUNCT))])
        else:
            toks.append(COMMON[rng.integers(len(COMMON))])
    return toks


def intrinsic_corpus(n: int = 200, seed: int = 0, entity_rate: float = 0.15,
                     first_entity_rate: float = 0.2) -> list[Sentence]:
    """Sentences cased only where the word itself demands it."""
    rng = np.random.default_rng(seed)
    return [Sentence(_sentence(rng, entity_rate, first_entity_rate)) for _ in range(n)]


def positional(sentence) -> Sentence:
    """Add sentence-initial capitalization to an intrinsically cased sentence."""
    toks = list(sentence)
    toks[0] = capitalize_first(toks[0])
    return Sentence(toks)


def positional_corpus(n: int = 200, seed: int = 0, **kw) -> list[Sentence]:
    return [positional(s) for s in intrinsic_corpus(n, seed, **kw)]


def toy_corpus(n: int = 200, seed: int = 0) -> list[Sentence]:
    """Positionally capitalized toy corpus rich in mixed-case tokens."""
    return positional_corpus(n, seed, entity_rate=0.2, first_entity_rate=0.25)
