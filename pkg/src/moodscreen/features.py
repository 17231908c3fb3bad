"""Classifier feature space: TF-IDF n-grams unioned with lexicon densities.

Two configurations are supported, selectable at training time:

* ``empath``        - lexicon category densities only;
* ``tfidf+empath``  - L2-normalized TF-IDF n-gram weights concatenated
                      with the raw lexicon densities.

Vocabulary construction keeps the ``max_features`` n-grams with the
highest document frequency (ties lexicographic) and uses the smoothed
inverse document frequency ln((1 + N) / (1 + df)) + 1.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from moodscreen import util
from moodscreen.lexicon import LexiconBundle, analyze
from moodscreen.text import Ngram, TokenStream, ngrams

VOCAB_SCHEMA_VERSION = 1

EMPATH_ONLY = "empath"
TFIDF_EMPATH = "tfidf+empath"
FEATURE_MODES = (EMPATH_ONLY, TFIDF_EMPATH)


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Sparse non-negative vector with named index ranges."""

    indices: np.ndarray  # strictly increasing, < dimension
    values: np.ndarray
    dimension: int
    segments: dict[str, tuple[int, int]]
    config_hash: str | None = None

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values must have equal length")
        if len(self.indices) and (
            int(self.indices[-1]) >= self.dimension
            or np.any(np.diff(self.indices) <= 0)
        ):
            raise ValueError("indices must be strictly increasing and < dimension")

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dimension, dtype=np.float64)
        dense[self.indices] = self.values
        return dense


def _vector(indices, values, dimension, segments, config_hash=None) -> FeatureVector:
    return FeatureVector(
        indices=np.asarray(indices, dtype=np.int64),
        values=np.asarray(values, dtype=np.float64),
        dimension=dimension,
        segments=segments,
        config_hash=config_hash,
    )


@dataclass
class TfidfVocabulary:
    entries: dict[Ngram, tuple[int, float]]  # ngram -> (index, idf)
    n_min: int
    n_max: int
    max_features: int
    n_documents: int

    @property
    def size(self) -> int:
        return len(self.entries)

    def to_dict(self) -> dict:
        return {
            "n_min": self.n_min,
            "n_max": self.n_max,
            "max_features": self.max_features,
            "n_documents": self.n_documents,
            "entries": [
                [list(g), idx, idf]
                for g, (idx, idf) in sorted(self.entries.items(), key=lambda kv: kv[1][0])
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TfidfVocabulary":
        return cls(
            entries={
                tuple(g): (int(idx), float(idf)) for g, idx, idf in doc["entries"]
            },
            n_min=int(doc["n_min"]),
            n_max=int(doc["n_max"]),
            max_features=int(doc["max_features"]),
            n_documents=int(doc["n_documents"]),
        )


def build_vocab(
    corpus: Sequence[TokenStream], n_min: int, n_max: int, max_features: int
) -> TfidfVocabulary:
    """Select the top ``max_features`` n-grams by document frequency.

    Ties break lexicographically (smaller n-gram kept); indices are
    assigned in lexicographic order over the selected n-grams, so the
    vocabulary is a pure function of the corpus as a set.
    """
    if not corpus:
        raise ValueError("corpus must be non-empty")
    if max_features < 1:
        raise ValueError("max_features must be >= 1")
    df: Counter[Ngram] = Counter()
    for doc in corpus:
        df.update(set(ngrams(doc, n_min, n_max)))
    ranked = sorted(df.items(), key=lambda kv: (-kv[1], kv[0]))[:max_features]
    n_docs = len(corpus)
    entries = {
        gram: (index, math.log((1 + n_docs) / (1 + gram_df)) + 1.0)
        for index, (gram, gram_df) in enumerate(sorted(ranked, key=lambda kv: kv[0]))
    }
    return TfidfVocabulary(
        entries=entries,
        n_min=n_min,
        n_max=n_max,
        max_features=max_features,
        n_documents=n_docs,
    )


def tfidf_vector(doc: TokenStream, vocab: TfidfVocabulary) -> FeatureVector:
    """Raw n-gram count times idf, L2-normalized when nonzero."""
    counts = Counter(ngrams(doc, vocab.n_min, vocab.n_max))
    weighted: dict[int, float] = {}
    for gram, count in counts.items():
        entry = vocab.entries.get(gram)
        if entry is not None:
            index, idf = entry
            weighted[index] = count * idf
    indices = sorted(weighted)
    values = np.asarray([weighted[i] for i in indices], dtype=np.float64)
    norm = float(np.linalg.norm(values))
    if norm > 0.0:
        values = values / norm
    return _vector(indices, values, vocab.size, {"tfidf": (0, vocab.size)})


def empath_vector(doc: TokenStream, bundle: LexiconBundle) -> FeatureVector:
    """One density per category: symptoms in config order, then positive,
    then negative."""
    categories = bundle.categories()
    densities = [analyze(doc, cat) for cat in categories]
    indices = [i for i, v in enumerate(densities) if v != 0.0]
    values = [densities[i] for i in indices]
    return _vector(indices, values, len(categories), {"empath": (0, len(categories))})


def union(tfidf: FeatureVector, empath: FeatureVector) -> FeatureVector:
    """Concatenate a tfidf-only vector with an empath-only vector."""
    if set(tfidf.segments) != {"tfidf"} or set(empath.segments) != {"empath"}:
        raise ValueError(
            "union expects a tfidf-segment vector and an empath-segment vector"
        )
    offset = tfidf.dimension
    indices = np.concatenate([tfidf.indices, empath.indices + offset])
    values = np.concatenate([tfidf.values, empath.values])
    return _vector(
        indices,
        values,
        offset + empath.dimension,
        {"tfidf": (0, offset), "empath": (offset, offset + empath.dimension)},
    )


@dataclass
class FeaturePipeline:
    """Frozen featurization config: lexicon bundle plus optional vocabulary.

    Vectors it produces carry ``config_hash`` so a trained model can
    refuse features from a different pipeline.
    """

    bundle: LexiconBundle
    vocab: TfidfVocabulary | None = None

    @property
    def mode(self) -> str:
        return TFIDF_EMPATH if self.vocab is not None else EMPATH_ONLY

    @property
    def dimension(self) -> int:
        empath_dim = len(self.bundle.categories())
        return empath_dim + (self.vocab.size if self.vocab is not None else 0)

    @cached_property
    def config_hash(self) -> str:
        return util.content_hash(self.to_dict())

    def vector(self, doc: TokenStream) -> FeatureVector:
        empath = empath_vector(doc, self.bundle)
        if self.vocab is None:
            out = empath
        else:
            out = union(tfidf_vector(doc, self.vocab), empath)
        return FeatureVector(
            indices=out.indices,
            values=out.values,
            dimension=out.dimension,
            segments=out.segments,
            config_hash=self.config_hash,
        )

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "tfidf": self.vocab.to_dict() if self.vocab is not None else None,
            "lexicon": self.bundle.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FeaturePipeline":
        vocab = doc.get("tfidf")
        return cls(
            bundle=LexiconBundle.from_dict(doc["lexicon"]),
            vocab=TfidfVocabulary.from_dict(vocab) if vocab is not None else None,
        )


def save_vocab(path: str | Path, vocab: TfidfVocabulary) -> None:
    doc = {"version": VOCAB_SCHEMA_VERSION, **vocab.to_dict()}
    util.write_atomic(path, util.canonical_json(doc) + "\n")


def load_vocab(path: str | Path) -> TfidfVocabulary:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("version")
    if version != VOCAB_SCHEMA_VERSION:
        raise ValueError(f"unsupported vocabulary schema version: {version!r}")
    return TfidfVocabulary.from_dict(doc)
