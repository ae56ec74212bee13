import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from truecaser.corpus import (
    LOWER, OTHER, SELF, UPPER, Sentence, WordClass, case_fold, case_fold_token,
    classify_word_class, derive_labels, read_corpus, reconstruct, tokenize, write_corpus,
)
from truecaser.errors import EmptyLine, MalformedLine

tokens = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Zs", "Zl", "Zp", "Cc")),
    min_size=1, max_size=12,
).filter(lambda t: t.split() == [t])
sentences = st.lists(tokens, min_size=1, max_size=8)


class TestTokenize:
    def test_split(self):
        assert list(tokenize("so , apples")) == ["so", ",", "apples"]

    def test_single(self):
        assert list(tokenize("iphone")) == ["iphone"]

    def test_collapses_whitespace(self):
        assert list(tokenize("  a  b ")) == ["a", "b"]

    @pytest.mark.parametrize("line", ["", "   ", "\t\n"])
    def test_empty_line(self, line):
        with pytest.raises(EmptyLine):
            tokenize(line)

    def test_sentence_rejects_bad_tokens(self):
        with pytest.raises(ValueError):
            Sentence(["a b"])
        with pytest.raises(ValueError):
            Sentence([""])


class TestCaseFold:
    @pytest.mark.parametrize("tok,folded", [
        ("iPhone", "iphone"), (",", ","), ("McDonald's", "mcdonald's"),
        ("NASA", "nasa"), ("Ärger", "ärger"), ("ΣΟΦΙΑ", "σοφια"),
    ])
    def test_examples(self, tok, folded):
        assert case_fold_token(tok) == folded

    @pytest.mark.parametrize("tok", ["ß", "İ", "K", "ǅ"])
    def test_non_one_to_one_is_caseless(self, tok):
        # dotted capital I lowercases to two code points; Kelvin sign and the
        # titlecase digraph do not round-trip
        assert case_fold_token(tok) == tok

    @given(tokens)
    def test_length_preserved_and_idempotent(self, tok):
        low = case_fold_token(tok)
        assert len(low) == len(tok)
        assert case_fold_token(low) == low


class TestDeriveLabels:
    def test_iphone_sentence(self):
        ex = derive_labels(["iPhone", "is", "great"])
        assert ex.word_labels == (OTHER, SELF, SELF)
        assert ex.char_labels[0] == (LOWER, UPPER, LOWER, LOWER, LOWER, LOWER)
        assert ex.char_labels[1] is None and ex.char_labels[2] is None
        assert list(ex.input) == ["iphone", "is", "great"]

    def test_all_lowercase(self):
        ex = derive_labels(["hello"])
        assert ex.word_labels == (SELF,)
        assert ex.char_labels == (None,)

    def test_hewlett_packard(self):
        ex = derive_labels(["Hewlett-Packard"])
        U, L = UPPER, LOWER
        assert ex.word_labels == (OTHER,)
        assert ex.char_labels[0] == (U, L, L, L, L, L, L, L, U, L, L, L, L, L, L)

    def test_caseless_tokens_are_self(self):
        ex = derive_labels([",", "2009", "--"])
        assert ex.word_labels == (SELF, SELF, SELF)

    @given(sentences)
    def test_invariants(self, toks):
        ex = derive_labels(toks)
        assert len(ex.input) == len(ex.reference) == len(ex.word_labels) == len(toks)
        for i, (x, y) in enumerate(zip(ex.input, ex.reference)):
            assert case_fold_token(y) == x
            assert (ex.word_labels[i] == SELF) == (x == y)
            if ex.word_labels[i] == OTHER:
                assert len(ex.char_labels[i]) == len(x)
            else:
                assert ex.char_labels[i] is None

    @given(sentences)
    def test_reconstruction(self, toks):
        assert list(reconstruct(derive_labels(toks))) == toks


class TestWordClass:
    @pytest.mark.parametrize("tok,cls", [
        ("apple", WordClass.LC), ("Apple", WordClass.UC), ("NASA", WordClass.CA),
        ("iPhone", WordClass.MC), (",", WordClass.LC), ("McDonald's", WordClass.MC),
        ("Hewlett-Packard", WordClass.MC), ("I", WordClass.CA), ("2009", WordClass.LC),
        ("'Tis", WordClass.UC), ("LEDs", WordClass.MC),
    ])
    def test_examples(self, tok, cls):
        assert classify_word_class(tok) is cls

    @given(tokens)
    def test_folded_is_lc(self, tok):
        assert classify_word_class(tok) in set(WordClass)
        assert classify_word_class(case_fold_token(tok)) is WordClass.LC


class TestCorpusFiles:
    def test_read(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_bytes(b"a b\nc d\n")
        got = list(read_corpus(p))
        assert [list(s) for s in got] == [["a", "b"], ["c", "d"]]

    def test_empty_file(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_bytes(b"")
        assert list(read_corpus(p)) == []

    def test_empty_line_reports_line_number(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_bytes(b"a b\n\nc\n")
        with pytest.raises(MalformedLine) as err:
            list(read_corpus(p))
        assert err.value.lineno == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            list(read_corpus(tmp_path / "nope.txt"))

    @settings(max_examples=50)
    @given(st.lists(sentences, max_size=6))
    def test_round_trip_bytes(self, tmp_path_factory, corpus):
        d = tmp_path_factory.mktemp("rt")
        src = d / "in.txt"
        src.write_bytes("".join(" ".join(s) + "\n" for s in corpus).encode("utf-8"))
        out = d / "out.txt"
        write_corpus(read_corpus(src), out)
        assert out.read_bytes() == src.read_bytes()

    def test_fold_preserves_token_count(self):
        s = Sentence(["Apples", "Are", "Good"])
        assert len(case_fold(s)) == 3
