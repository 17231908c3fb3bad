import pytest
from hypothesis import given
from hypothesis import strategies as st

from moodscreen.text import PhraseMatcher, TokenStream, ngrams, phrase_count, tokenize

words = st.text(
    alphabet=st.sampled_from("abcxyz-'"), min_size=1, max_size=6
).filter(lambda w: any(c.isalnum() for c in w))
texts = st.lists(words, max_size=30).map(" ".join)


class TestTokenize:
    def test_lowercases_and_strips_punctuation(self):
        stream = tokenize("I hate Myself!")
        assert stream.tokens == ("i", "hate", "myself")
        assert stream.source_len == 3

    def test_empty_input(self):
        assert tokenize("").tokens == ()
        assert tokenize("").source_len == 0

    def test_hyphenated_terms_survive_and_symbols_drop(self):
        assert tokenize("self-harm ... :(").tokens == ("self-harm",)

    def test_interior_apostrophe_preserved(self):
        assert tokenize("Don't!").tokens == ("don't",)

    def test_whitespace_only(self):
        assert tokenize(" \t\n ").tokens == ()

    @given(texts)
    def test_idempotent_on_own_output(self, text):
        once = tokenize(text)
        again = tokenize(" ".join(once.tokens))
        assert again.tokens == once.tokens

    @given(texts)
    def test_tokens_are_lowercase_nonempty_no_whitespace(self, text):
        for tok in tokenize(text).tokens:
            assert tok
            assert tok == tok.lower()
            assert not any(c.isspace() for c in tok)


class TestNgrams:
    def test_bigram_trigram_order(self):
        stream = TokenStream(("a", "b", "c"))
        assert ngrams(stream, 2, 3) == [("a", "b"), ("b", "c"), ("a", "b", "c")]

    def test_short_stream_yields_nothing(self):
        assert ngrams(TokenStream(("a",)), 2, 3) == []

    def test_unigram_identity(self):
        assert ngrams(TokenStream(("a", "b")), 1, 1) == [("a",), ("b",)]

    @pytest.mark.parametrize("n_min,n_max", [(0, 2), (3, 2), (-1, -1)])
    def test_invalid_range(self, n_min, n_max):
        with pytest.raises(ValueError):
            ngrams(TokenStream(("a", "b")), n_min, n_max)

    @given(st.lists(st.sampled_from("abc"), max_size=12), st.integers(1, 4),
           st.integers(0, 3))
    def test_total_count_formula(self, tokens, n_min, extra):
        n_max = n_min + extra
        stream = TokenStream(tuple(tokens))
        got = ngrams(stream, n_min, n_max)
        expected = sum(
            max(0, stream.source_len - n + 1) for n in range(n_min, n_max + 1)
        )
        assert len(got) == expected


class TestPhraseCount:
    def test_multiword_term(self):
        assert phrase_count(TokenStream(("i", "lost", "weight", "loss")), "weight loss") == 1

    def test_overlapping_occurrences(self):
        assert phrase_count(TokenStream(("a", "a", "a")), "a a") == 2

    def test_absent_term(self):
        assert phrase_count(TokenStream(("x", "y")), "z") == 0

    def test_empty_term_rejected(self):
        with pytest.raises(ValueError):
            phrase_count(TokenStream(("a",)), "...")

    @given(texts, words)
    def test_single_token_count_bounded_by_length(self, text, term):
        stream = tokenize(text)
        needle = tokenize(term)
        if needle.source_len != 1:
            return
        assert phrase_count(stream, term) <= stream.source_len


class TestPhraseMatcher:
    def test_counts_match_phrase_count(self):
        stream = tokenize("a b a b a c a")
        terms = [("a",), ("a", "b"), ("b", "a"), ("c", "a"), ("z",)]
        matcher = PhraseMatcher(terms)
        got = matcher.counts(stream)
        for term, count in zip(terms, got):
            assert count == phrase_count(stream, " ".join(term))

    def test_rejects_empty_terms(self):
        with pytest.raises(ValueError):
            PhraseMatcher([()])

    @given(st.lists(st.sampled_from("ab"), max_size=20))
    def test_matcher_agrees_with_naive_scan(self, tokens):
        stream = TokenStream(tuple(tokens))
        terms = [("a",), ("b", "b"), ("a", "b", "a")]
        got = PhraseMatcher(terms).counts(stream)
        for term, count in zip(terms, got):
            naive = sum(
                1
                for i in range(len(tokens) - len(term) + 1)
                if tuple(tokens[i : i + len(term)]) == term
            )
            assert count == naive
