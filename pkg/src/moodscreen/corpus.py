"""Corpus data model: JSONL ingestion, keyword labeling, splits, stats.

The canonical corpus format is one JSON object per line with at least
``id``, ``kind`` and ``text``; see docs/formats.md for the full schema.
No live platform client ships here: acquisition is represented by the
file format contract, and anything that can produce conforming JSONL
(an exporter, an API scraper, a takeout converter) can feed the
pipeline.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from datetime import datetime
from pathlib import Path
from typing import IO, Iterable, Sequence

from moodscreen import util
from moodscreen.labels import LABELS
from moodscreen.text import phrase_count, tokenize

TRANSCRIPT = "transcript"
COMMENT = "comment"
KINDS = (TRANSCRIPT, COMMENT)

RULES_SCHEMA_VERSION = 1

# Reconstruction of the depressive search-keyword methodology; the real
# validated keyword list is not public, so this default is a documented
# editable stand-in (see README).
DEFAULT_KEYWORD_RULES: list[dict] = [
    {
        "label": "depressive",
        "match_field": "tags",
        "keywords": ["self-harm", "suicidal", "triggering", "depression", "depressing"],
    },
    {
        "label": "non_depressive",
        "category": "funny",
        "match_field": "tags",
        "keywords": ["funny", "comedy", "prank"],
    },
    {
        "label": "non_depressive",
        "category": "educational",
        "match_field": "tags",
        "keywords": ["educational", "lecture", "tutorial"],
    },
]


class CorpusFormatError(ValueError):
    """Malformed corpus line; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Document:
    id: str
    kind: str
    text: str
    label: str | None = None
    category: str | None = None
    video_id: str | None = None
    timestamp: datetime | None = None
    tags: tuple[str, ...] = ()
    title: str | None = None
    query: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown document kind {self.kind!r}")
        if self.label is not None and self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}")
        if self.kind == COMMENT and not self.video_id:
            raise ValueError(f"comment {self.id!r} is missing video_id")

    def to_dict(self) -> dict:
        doc: dict = {"id": self.id, "kind": self.kind, "text": self.text}
        if self.label is not None:
            doc["label"] = self.label
        if self.category is not None:
            doc["category"] = self.category
        if self.video_id is not None:
            doc["video_id"] = self.video_id
        if self.timestamp is not None:
            doc["timestamp"] = util.format_timestamp(self.timestamp)
        if self.tags:
            doc["tags"] = list(self.tags)
        if self.title is not None:
            doc["title"] = self.title
        if self.query is not None:
            doc["query"] = self.query
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Document":
        missing = [k for k in ("id", "kind", "text") if k not in doc]
        if missing:
            raise ValueError(f"missing required field(s): {', '.join(missing)}")
        ts = doc.get("timestamp")
        return cls(
            id=str(doc["id"]),
            kind=doc["kind"],
            text=doc["text"],
            label=doc.get("label"),
            category=doc.get("category"),
            video_id=doc.get("video_id"),
            timestamp=util.parse_timestamp(ts) if ts is not None else None,
            tags=tuple(doc.get("tags", ())),
            title=doc.get("title"),
            query=doc.get("query"),
        )


def _parse_lines(source: Iterable[str]) -> Iterable[tuple[int, dict]]:
    for lineno, raw in enumerate(source, start=1):
        if not raw.strip():
            continue
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"invalid JSON: {exc.msg}", lineno) from None
        if not isinstance(payload, dict):
            raise CorpusFormatError("expected a JSON object", lineno)
        yield lineno, payload


def scan_corpus(
    source: str | Path | IO,
) -> tuple[list[Document], list[CorpusFormatError]]:
    """Lenient load: collect malformed lines instead of raising."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return scan_corpus(fh)
    documents: list[Document] = []
    issues: list[CorpusFormatError] = []
    seen_ids: set[str] = set()
    lines = iter(enumerate(source, start=1))
    for lineno, raw in lines:
        if not raw.strip():
            continue
        try:
            payload = json.loads(raw)
            if not isinstance(payload, dict):
                raise ValueError("expected a JSON object")
            document = Document.from_dict(payload)
            if document.id in seen_ids:
                raise ValueError(f"duplicate id {document.id!r}")
        except (ValueError, TypeError) as exc:
            msg = exc.msg if isinstance(exc, json.JSONDecodeError) else str(exc)
            issues.append(CorpusFormatError(msg, lineno))
            continue
        seen_ids.add(document.id)
        documents.append(document)
    return documents, issues


def load_corpus(source: str | Path | IO, strict: bool = True) -> list[Document]:
    """Load a JSONL corpus; in strict mode the first bad line raises."""
    if not strict:
        return scan_corpus(source)[0]
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_corpus(fh, strict=True)
    documents: list[Document] = []
    seen_ids: set[str] = set()
    for lineno, payload in _parse_lines(source):
        try:
            document = Document.from_dict(payload)
        except ValueError as exc:
            raise CorpusFormatError(str(exc), lineno) from None
        if document.id in seen_ids:
            raise CorpusFormatError(f"duplicate id {document.id!r}", lineno)
        seen_ids.add(document.id)
        documents.append(document)
    return documents


def save_corpus(path: str | Path, documents: Sequence[Document]) -> None:
    lines = [util.canonical_json(d.to_dict()) for d in documents]
    util.write_atomic(path, "\n".join(lines) + ("\n" if lines else ""))


@dataclass(frozen=True)
class KeywordRule:
    """Assigns a label and/or category when a keyword phrase matches."""

    keywords: tuple[str, ...]
    match_field: str  # "tags" | "title" | "query"
    label: str | None = None
    category: str | None = None

    def __post_init__(self) -> None:
        if not self.keywords:
            raise ValueError("rule keywords must be non-empty")
        if self.match_field not in ("tags", "title", "query"):
            raise ValueError(f"unknown match_field {self.match_field!r}")
        if self.label is None and self.category is None:
            raise ValueError("rule must set a label or a category")
        object.__setattr__(
            self, "keywords", tuple(k.lower() for k in self.keywords)
        )

    def matches(self, doc: Document) -> bool:
        if self.match_field == "tags":
            fields = doc.tags
        elif self.match_field == "title":
            fields = (doc.title,) if doc.title else ()
        else:
            fields = (doc.query,) if doc.query else ()
        streams = [tokenize(f) for f in fields]
        for keyword in self.keywords:
            if any(s.source_len and phrase_count(s, keyword) > 0 for s in streams):
                return True
        return False


def keyword_label(doc: Document, rules: Sequence[KeywordRule]) -> Document:
    """Apply the first matching rule (list order is priority order)."""
    for rule in rules:
        if rule.matches(doc):
            return replace(
                doc,
                label=rule.label if rule.label is not None else doc.label,
                category=rule.category if rule.category is not None else doc.category,
            )
    return doc


def rules_from_dicts(docs: Sequence[dict]) -> list[KeywordRule]:
    return [
        KeywordRule(
            keywords=tuple(d["keywords"]),
            match_field=d.get("match_field", "tags"),
            label=d.get("label"),
            category=d.get("category"),
        )
        for d in docs
    ]


def load_rules(path: str | Path) -> list[KeywordRule]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("version")
    if version != RULES_SCHEMA_VERSION:
        raise ValueError(f"unsupported rules schema version: {version!r}")
    return rules_from_dicts(doc["rules"])


def split(
    corpus: Sequence[Document], test_fraction: float, seed: int
) -> tuple[list[Document], list[Document]]:
    """Deterministic stratified split.

    Stratification is by label; every labeled class needs at least two
    documents. Unlabeled documents are split at the same fraction as
    their own stratum.
    """
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must be in (0, 1)")
    groups: dict[str, list[int]] = {}
    for i, doc in enumerate(corpus):
        groups.setdefault(doc.label or "", []).append(i)
    labeled = {k: v for k, v in groups.items() if k}
    if not labeled:
        raise ValueError("corpus has no labeled documents to stratify on")
    weak = sorted(k for k, v in labeled.items() if len(v) < 2)
    if weak:
        raise ValueError(f"insufficient class support (need >= 2 docs): {weak}")

    rng = random.Random(seed)
    test_idx: set[int] = set()
    for key in sorted(groups):
        indices = list(groups[key])
        rng.shuffle(indices)
        n_test = round(test_fraction * len(indices))
        test_idx.update(indices[:n_test])
    train = [doc for i, doc in enumerate(corpus) if i not in test_idx]
    test = [doc for i, doc in enumerate(corpus) if i in test_idx]
    return train, test


@dataclass(frozen=True)
class CorpusStats:
    n_documents: int
    by_kind: dict[str, int]
    by_label: dict[str, int]
    words_by_label: dict[str, int]
    total_words: int

    def to_dict(self) -> dict:
        return {
            "n_documents": self.n_documents,
            "by_kind": dict(self.by_kind),
            "by_label": dict(self.by_label),
            "words_by_label": dict(self.words_by_label),
            "total_words": self.total_words,
        }


def corpus_stats(corpus: Sequence[Document]) -> CorpusStats:
    """Document and token counts by kind and label (tokens per the
    package tokenizer)."""
    by_kind: dict[str, int] = {}
    by_label: dict[str, int] = {}
    words_by_label: dict[str, int] = {}
    total_words = 0
    for doc in corpus:
        words = tokenize(doc.text).source_len
        label = doc.label or "unlabeled"
        by_kind[doc.kind] = by_kind.get(doc.kind, 0) + 1
        by_label[label] = by_label.get(label, 0) + 1
        words_by_label[label] = words_by_label.get(label, 0) + words
        total_words += words
    return CorpusStats(
        n_documents=len(corpus),
        by_kind=by_kind,
        by_label=by_label,
        words_by_label=words_by_label,
        total_words=total_words,
    )
