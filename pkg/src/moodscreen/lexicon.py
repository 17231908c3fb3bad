"""Lexical categories built from seed terms via word-embedding similarity.

A category starts from a handful of seed terms and grows by cosine
nearest-neighbor lookup in a static embedding table; scoring a text
against a category is the summed occurrence count of its terms divided
by the text's token count. Categories expand once and are then frozen,
so downstream scoring never needs the embedding file again.

The default seed configuration below is an editable stand-in: one
category per depression-symptom group plus fixed positive/negative
emotion seeds. Treat it as configuration, not ground truth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from moodscreen import util
from moodscreen.text import PhraseMatcher, TokenStream, tokenize

LEXICON_SCHEMA_VERSION = 1

DEFAULT_TOP_K = 50
DEFAULT_MIN_SIM = 0.5

# One symptom category per questionnaire item group; seeds are
# reconstructions chosen for topical coverage and are meant to be
# overridden by a user-supplied seed file.
DEFAULT_SEEDS: dict = {
    "symptom_categories": [
        {"name": "sleep", "seeds": ["insomnia", "sleepless", "restless"]},
        {"name": "appetite", "seeds": ["appetite", "weight loss", "overeating"]},
        {"name": "loneliness", "seeds": ["lonely", "alone", "isolated"]},
        {"name": "crying", "seeds": ["cry", "crying", "tears"]},
        {"name": "sadness", "seeds": ["sad", "sadness", "miserable"]},
        {"name": "hopelessness", "seeds": ["hopeless", "despair", "failure"]},
        {"name": "self-hate", "seeds": ["worthless", "self-hate", "hate myself"]},
        {"name": "fear", "seeds": ["fearful", "afraid", "scared"]},
        {"name": "fatigue", "seeds": ["tired", "exhausted", "fatigue"]},
    ],
    "positive": {"name": "positive", "seeds": ["happy", "joy", "love", "hope"]},
    "negative": {"name": "negative", "seeds": ["sad", "hate", "pain", "cry"]},
}


class EmbeddingFormatError(ValueError):
    """Malformed embedding file; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmbeddingTable:
    """Immutable word -> vector table with a dense matrix for similarity scans."""

    def __init__(self, words: list[str], matrix: np.ndarray):
        if matrix.ndim != 2 or matrix.shape[0] != len(words):
            raise ValueError("matrix shape does not match word list")
        if matrix.shape[1] < 1:
            raise ValueError("embedding dimension must be positive")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("embedding vectors must be finite")
        self.words = list(words)
        self.matrix = np.asarray(matrix, dtype=np.float64)
        self.index = {w: i for i, w in enumerate(self.words)}
        self._norms = np.linalg.norm(self.matrix, axis=1)
        self._word_arr = np.asarray(self.words)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def vector(self, word: str) -> np.ndarray | None:
        i = self.index.get(word)
        return None if i is None else self.matrix[i]


def load_embeddings(source: str | Path | IO) -> EmbeddingTable:
    """Parse a plain-text word-vector file: one ``word v1 .. vd`` per line.

    Blank lines are skipped; duplicate words keep the first occurrence.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_embeddings(fh)

    words: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    dimension: int | None = None
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        parts = raw.split()
        if not parts:
            continue
        word, comps = parts[0], parts[1:]
        if dimension is None:
            if not comps:
                raise EmbeddingFormatError("no vector components", lineno)
            dimension = len(comps)
        elif len(comps) != dimension:
            raise EmbeddingFormatError(
                f"expected {dimension} components, got {len(comps)}", lineno
            )
        try:
            values = [float(c) for c in comps]
        except ValueError as exc:
            raise EmbeddingFormatError(f"non-numeric component: {exc}", lineno) from None
        if word in seen:
            continue
        seen.add(word)
        words.append(word)
        rows.append(values)
    if dimension is None:
        raise EmbeddingFormatError("empty embedding source", 0)
    return EmbeddingTable(words, np.asarray(rows, dtype=np.float64))


@dataclass
class LexiconCategory:
    """A named term set with per-term similarity to its seeds.

    ``terms`` is sorted by similarity descending, ties lexicographic;
    seeds always appear with similarity exactly 1.0.
    """

    name: str
    seeds: tuple[str, ...]
    terms: tuple[tuple[str, float], ...]
    _matcher: PhraseMatcher | None = field(default=None, compare=False, repr=False)

    def term_strings(self) -> tuple[str, ...]:
        return tuple(t for t, _ in self.terms)

    def matcher(self) -> PhraseMatcher:
        if self._matcher is None:
            token_seqs = [tokenize(t).tokens for t, _ in self.terms]
            # Terms that tokenize to nothing can never match; keep list
            # alignment by mapping them to an impossible one-token term.
            token_seqs = [seq if seq else ("\0",) for seq in token_seqs]
            self._matcher = PhraseMatcher(token_seqs)
        return self._matcher

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seeds": list(self.seeds),
            "terms": [[t, s] for t, s in self.terms],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LexiconCategory":
        return cls(
            name=doc["name"],
            seeds=tuple(doc["seeds"]),
            terms=tuple((t, float(s)) for t, s in doc["terms"]),
        )


def _sorted_terms(best: dict[str, float]) -> tuple[tuple[str, float], ...]:
    return tuple(sorted(best.items(), key=lambda kv: (-kv[1], kv[0])))


def seed_vector(seed: str, table: EmbeddingTable) -> np.ndarray | None:
    """Mean of the seed's in-vocabulary token vectors; None if none are known."""
    vectors = [table.vector(tok) for tok in tokenize(seed).tokens]
    vectors = [v for v in vectors if v is not None]
    if not vectors:
        return None
    return np.mean(vectors, axis=0)


def expand_category(
    name: str,
    seeds: Iterable[str],
    table: EmbeddingTable | None,
    top_k: int = DEFAULT_TOP_K,
    min_sim: float = DEFAULT_MIN_SIM,
) -> LexiconCategory:
    """Grow a category from seeds by cosine nearest neighbors.

    Each seed contributes itself at similarity 1.0 plus its ``top_k``
    nearest vocabulary words with similarity >= ``min_sim``; duplicates
    keep the highest similarity. Seeds without any in-vocabulary token
    contribute only themselves, and ``table=None`` disables expansion.
    """
    seeds = tuple(dict.fromkeys(seeds))
    if not seeds:
        raise ValueError(f"category {name!r}: seeds must be non-empty")
    if top_k < 0:
        raise ValueError("top_k must be >= 0")
    if not -1.0 <= min_sim <= 1.0:
        raise ValueError("min_sim must be in [-1, 1]")

    best: dict[str, float] = {}
    if table is not None and top_k > 0:
        norms = table._norms
        for seed in seeds:
            v = seed_vector(seed, table)
            if v is None:
                continue
            v_norm = float(np.linalg.norm(v))
            if v_norm == 0.0:
                continue
            with np.errstate(invalid="ignore", divide="ignore"):
                sims = table.matrix @ v / (norms * v_norm)
            sims = np.where(np.isfinite(sims), sims, 0.0)
            # similarity descending, lexicographic tie-break
            order = np.lexsort((table._word_arr, -sims))
            for idx in order[:top_k]:
                sim = float(sims[idx])
                if sim < min_sim:
                    break
                word = table.words[idx]
                if sim > best.get(word, -2.0):
                    best[word] = sim
    for seed in seeds:
        best[seed] = 1.0
    return LexiconCategory(name=name, seeds=seeds, terms=_sorted_terms(best))


def analyze(stream: TokenStream, category: LexiconCategory) -> float:
    """Occurrence density of the category's terms in the stream.

    Summed (possibly overlapping) occurrence counts over all category
    terms, divided by the stream's token count; 0.0 for empty streams.
    """
    if stream.source_len == 0 or not category.terms:
        return 0.0
    total = int(category.matcher().counts(stream).sum())
    return total / stream.source_len


@dataclass
class LexiconBundle:
    """Symptom categories plus positive/negative emotion lexicons."""

    symptom_categories: tuple[LexiconCategory, ...]
    positive: LexiconCategory
    negative: LexiconCategory
    _union_matcher: PhraseMatcher | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.symptom_categories:
            raise ValueError("bundle needs at least one symptom category")
        pos = set(self.positive.term_strings())
        neg = set(self.negative.term_strings())
        overlap = pos & neg
        if overlap:
            raise ValueError(
                f"positive/negative term sets must be disjoint, shared: {sorted(overlap)}"
            )

    @classmethod
    def build(
        cls,
        symptom_categories: Iterable[LexiconCategory],
        positive: LexiconCategory,
        negative: LexiconCategory,
    ) -> "LexiconBundle":
        """Assemble a bundle, resolving positive/negative overlaps.

        A term claimed by both emotion lexicons stays on the side with
        the strictly higher similarity; exact ties drop it from both.
        """
        pos = dict(positive.terms)
        neg = dict(negative.terms)
        for term in sorted(set(pos) & set(neg)):
            if pos[term] > neg[term]:
                del neg[term]
            elif neg[term] > pos[term]:
                del pos[term]
            else:
                del pos[term], neg[term]
        positive = LexiconCategory(positive.name, positive.seeds, _sorted_terms(pos))
        negative = LexiconCategory(negative.name, negative.seeds, _sorted_terms(neg))
        return cls(tuple(symptom_categories), positive, negative)

    def categories(self) -> tuple[LexiconCategory, ...]:
        """All categories in scoring order: symptoms, then positive, negative."""
        return (*self.symptom_categories, self.positive, self.negative)

    def symptom_term_union(self) -> tuple[str, ...]:
        """Deduplicated union of all symptom-category terms, first-seen order."""
        seen: dict[str, None] = {}
        for cat in self.symptom_categories:
            for term, _ in cat.terms:
                seen.setdefault(term, None)
        return tuple(seen)

    def symptom_union_matcher(self) -> PhraseMatcher:
        """Matcher over :meth:`symptom_term_union`, built once per bundle."""
        if self._union_matcher is None:
            token_seqs = [tokenize(t).tokens for t in self.symptom_term_union()]
            token_seqs = [seq if seq else ("\0",) for seq in token_seqs]
            self._union_matcher = PhraseMatcher(token_seqs)
        return self._union_matcher

    def to_dict(self) -> dict:
        return {
            "symptom_categories": [c.to_dict() for c in self.symptom_categories],
            "positive": self.positive.to_dict(),
            "negative": self.negative.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LexiconBundle":
        return cls(
            symptom_categories=tuple(
                LexiconCategory.from_dict(c) for c in doc["symptom_categories"]
            ),
            positive=LexiconCategory.from_dict(doc["positive"]),
            negative=LexiconCategory.from_dict(doc["negative"]),
        )

    @property
    def content_hash(self) -> str:
        return util.content_hash(self.to_dict())


def build_bundle(
    seed_config: dict | None = None,
    table: EmbeddingTable | None = None,
    top_k: int = DEFAULT_TOP_K,
    min_sim: float = DEFAULT_MIN_SIM,
) -> LexiconBundle:
    """Expand a seed configuration (defaults when None) into a bundle."""
    config = seed_config if seed_config is not None else DEFAULT_SEEDS
    symptoms = [
        expand_category(c["name"], c["seeds"], table, top_k, min_sim)
        for c in config["symptom_categories"]
    ]
    positive = expand_category(
        config["positive"].get("name", "positive"),
        config["positive"]["seeds"], table, top_k, min_sim,
    )
    negative = expand_category(
        config["negative"].get("name", "negative"),
        config["negative"]["seeds"], table, top_k, min_sim,
    )
    return LexiconBundle.build(symptoms, positive, negative)


def save_lexicon(
    path: str | Path, bundle: LexiconBundle, expansion: dict | None = None
) -> None:
    """Persist a bundle (version 1 schema) so scoring never needs embeddings."""
    doc = {
        "version": LEXICON_SCHEMA_VERSION,
        "expansion": expansion or {},
        **bundle.to_dict(),
    }
    util.write_atomic(path, util.canonical_json(doc) + "\n")


def load_lexicon(path: str | Path) -> LexiconBundle:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("version")
    if version != LEXICON_SCHEMA_VERSION:
        raise ValueError(f"unsupported lexicon schema version: {version!r}")
    return LexiconBundle.from_dict(doc)
