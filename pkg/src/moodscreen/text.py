"""Deterministic tokenization, n-gram extraction, and phrase matching.

Every downstream score in this package is defined over the token streams
produced here, so the rules are fixed and platform-independent:

* input is NFC-normalized, lowercased, and split on Unicode whitespace;
* non-alphanumeric characters are stripped from token edges only, so
  hyphenated terms ("self-harm") and contractions ("don't") survive;
* tokens that strip to nothing are dropped;
* no stemming or lemmatization.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from moodscreen import kernels

Ngram = tuple[str, ...]


@dataclass(frozen=True)
class TokenStream:
    """An ordered sequence of normalized tokens."""

    tokens: tuple[str, ...]

    @property
    def source_len(self) -> int:
        return len(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)


def _strip_edges(token: str) -> str:
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def tokenize(text: str) -> TokenStream:
    """Tokenize raw text. Total function: empty input gives an empty stream."""
    normalized = unicodedata.normalize("NFC", text).lower()
    tokens = []
    for raw in normalized.split():
        token = _strip_edges(raw)
        if token:
            tokens.append(token)
    return TokenStream(tuple(tokens))


def ngrams(stream: TokenStream, n_min: int, n_max: int) -> list[Ngram]:
    """All contiguous n-grams for each n in [n_min, n_max].

    Grouped by n ascending, document order within each n:
    ["a","b","c"], 2..3 -> [(a,b), (b,c), (a,b,c)].
    """
    if n_min < 1 or n_min > n_max:
        raise ValueError(f"invalid n-gram range {n_min}..{n_max}")
    tokens = stream.tokens
    out: list[Ngram] = []
    for n in range(n_min, n_max + 1):
        out.extend(tokens[i : i + n] for i in range(len(tokens) - n + 1))
    return out


def phrase_count(stream: TokenStream, term: str) -> int:
    """Number of (possibly overlapping) occurrences of a term's token
    sequence in the stream. The term is tokenized with the same rules."""
    needle = tokenize(term).tokens
    if not needle:
        raise ValueError(f"term {term!r} tokenizes to zero tokens")
    haystack = stream.tokens
    k = len(needle)
    return sum(1 for i in range(len(haystack) - k + 1) if haystack[i : i + k] == needle)


@dataclass
class PhraseMatcher:
    """Counts a fixed set of token-sequence terms against many streams.

    Terms are id-encoded once; per-stream counting runs through the
    kernel backend (compiled when available). Semantically equivalent to
    calling :func:`phrase_count` per term, just batched.
    """

    terms: Sequence[tuple[str, ...]]
    _token_ids: dict[str, int] = field(init=False, repr=False)
    _flat: np.ndarray = field(init=False, repr=False)
    _offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if any(len(t) == 0 for t in self.terms):
            raise ValueError("matcher terms must have at least one token")
        token_ids: dict[str, int] = {}
        flat: list[int] = []
        offsets = [0]
        for term in self.terms:
            flat.extend(token_ids.setdefault(tok, len(token_ids)) for tok in term)
            offsets.append(len(flat))
        self._token_ids = token_ids
        self._flat = np.asarray(flat, dtype=np.intc)
        self._offsets = np.asarray(offsets, dtype=np.intc)

    def __len__(self) -> int:
        return len(self.terms)

    def encode(self, stream: TokenStream) -> np.ndarray:
        ids = self._token_ids
        return np.fromiter(
            (ids.get(tok, -1) for tok in stream.tokens), dtype=np.intc, count=len(stream)
        )

    def counts(self, stream: TokenStream) -> np.ndarray:
        """Per-term occurrence counts, aligned with the ``terms`` order."""
        return kernels.count_phrases(self.encode(stream), self._flat, self._offsets)
