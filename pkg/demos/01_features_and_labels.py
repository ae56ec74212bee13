# # Features and labels
#
# What the network actually sees for a sentence: case-folded tokens, the
# SELF/OTHER word labels and the per-character U/L labels, plus the hashed
# character n-grams that make up each word's embedding.

import numpy as np

from truecaser.corpus import classify_word_class, derive_labels
from truecaser.features import extract_char_ngrams, hash_feature, ngram_text

# ## Targets

ex = derive_labels(["The", "iPhone", "is", "sold", "by", "Apple", "in", "the", "USA"])
for tok, inp, lab, chars in zip(ex.reference, ex.input, ex.word_labels, ex.char_labels):
    cases = "" if chars is None else "".join("U" if c else "L" for c in chars)
    print(f"{tok:10} {inp:10} {'OTHER' if lab else 'SELF':6} {cases:8} {classify_word_class(tok).value}")

# Only OTHER tokens carry character labels; SELF tokens are copied as-is.

# ## Character n-grams
#
# Every word becomes the multiset of its n-grams (n <= 3) with a boundary
# symbol at both ends.  A word of m characters always yields 3m + 1 of them.

grams = extract_char_ngrams("ave", 3)
print([ngram_text(g) for g in grams])
print("count:", len(grams), "= 3 * 3 + 1")

# Each n-gram is hashed into a fixed number of buckets; the word embedding
# is the sum of the bucket rows.

ids = [hash_feature(g, 5000) for g in grams]
print("bucket ids:", ids)

table = np.random.default_rng(0).standard_normal((5000, 4))
print("embedding of 'ave':", table[ids].sum(axis=0).round(3))
