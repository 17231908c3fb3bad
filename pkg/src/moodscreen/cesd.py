"""Density-based depression scoring of comments and videos.

A comment's score is the density of symptom-lexicon terms in its text,
multiplied by the excess of negative over positive emotion density, and
clamped at zero whenever positive sentiment dominates. Video scores
average per-comment results; the depressive threshold is either fixed
or calibrated as the mean score of depressive-labeled training videos.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from moodscreen import util
from moodscreen.labels import DEPRESSIVE, NON_DEPRESSIVE
from moodscreen.lexicon import LexiconBundle, analyze
from moodscreen.text import TokenStream

PRESENCE = "presence"
OCCURRENCE = "occurrence"
COUNTING_MODES = (PRESENCE, OCCURRENCE)

CONNOTATION_WEIGHTED = "connotation_weighted"
DENSITY_ONLY = "density_only"
AGGREGATE_MODES = (CONNOTATION_WEIGHTED, DENSITY_ONLY)

REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CesdCommentScore:
    comment_id: str
    term_freq: float
    connotation: float
    score: float

    def to_dict(self) -> dict:
        return {
            "comment_id": self.comment_id,
            "term_freq": self.term_freq,
            "connotation": self.connotation,
            "score": self.score,
        }


@dataclass(frozen=True)
class CesdReport:
    video_id: str
    comment_scores: tuple[CesdCommentScore, ...]
    aggregate_mode: str
    counting: str
    video_score: float
    n_comments: int
    zero_fraction: float
    lexicon_hash: str
    label: str | None = None
    category: str | None = None

    def to_dict(self) -> dict:
        doc = {
            "video_id": self.video_id,
            "aggregate_mode": self.aggregate_mode,
            "counting": self.counting,
            "video_score": self.video_score,
            "n_comments": self.n_comments,
            "zero_fraction": self.zero_fraction,
            "lexicon_hash": self.lexicon_hash,
            "comment_scores": [c.to_dict() for c in self.comment_scores],
        }
        if self.label is not None:
            doc["label"] = self.label
        if self.category is not None:
            doc["category"] = self.category
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "CesdReport":
        return cls(
            video_id=doc["video_id"],
            comment_scores=tuple(
                CesdCommentScore(
                    comment_id=c["comment_id"],
                    term_freq=float(c["term_freq"]),
                    connotation=float(c["connotation"]),
                    score=float(c["score"]),
                )
                for c in doc["comment_scores"]
            ),
            aggregate_mode=doc["aggregate_mode"],
            counting=doc["counting"],
            video_score=float(doc["video_score"]),
            n_comments=int(doc["n_comments"]),
            zero_fraction=float(doc["zero_fraction"]),
            lexicon_hash=doc["lexicon_hash"],
            label=doc.get("label"),
            category=doc.get("category"),
        )


@dataclass(frozen=True)
class CesdThreshold:
    value: float
    provenance: str  # "fixed" | "calibrated"
    calibration_set_size: int = 0

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("threshold must be >= 0")
        if self.provenance not in ("fixed", "calibrated"):
            raise ValueError(f"unknown threshold provenance {self.provenance!r}")
        if self.provenance == "calibrated" and self.calibration_set_size < 1:
            raise ValueError("calibrated threshold needs a non-empty calibration set")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "provenance": self.provenance,
            "calibration_set_size": self.calibration_set_size,
        }


def _term_freq(stream: TokenStream, bundle: LexiconBundle, counting: str) -> float:
    if stream.source_len == 0:
        return 0.0
    counts = bundle.symptom_union_matcher().counts(stream)
    hits = int((counts > 0).sum()) if counting == PRESENCE else int(counts.sum())
    return hits / stream.source_len


def comment_cesd(
    stream: TokenStream,
    bundle: LexiconBundle,
    counting: str = PRESENCE,
    comment_id: str = "",
) -> CesdCommentScore:
    """Score one comment.

    ``presence`` counts each symptom term at most once (the literal
    while/if formulation); ``occurrence`` counts every occurrence. The
    emotion densities always use occurrence counting.
    """
    if counting not in COUNTING_MODES:
        raise ValueError(f"unknown counting mode {counting!r}")
    term_freq = _term_freq(stream, bundle, counting)
    neg = analyze(stream, bundle.negative)
    pos = analyze(stream, bundle.positive)
    connotation = neg - pos
    score = term_freq * connotation if connotation > 0 else 0.0
    return CesdCommentScore(
        comment_id=comment_id, term_freq=term_freq, connotation=connotation, score=score
    )


def video_cesd(
    video_id: str,
    comments: Sequence[TokenStream],
    bundle: LexiconBundle,
    aggregate_mode: str = CONNOTATION_WEIGHTED,
    counting: str = PRESENCE,
    comment_ids: Sequence[str] | None = None,
    label: str | None = None,
    category: str | None = None,
) -> CesdReport:
    """Score a video as the mean of its per-comment results.

    ``connotation_weighted`` averages the final comment scores;
    ``density_only`` averages the raw symptom densities. The reduction
    runs in comment_id order so results are bit-stable.
    """
    if aggregate_mode not in AGGREGATE_MODES:
        raise ValueError(f"unknown aggregate mode {aggregate_mode!r}")
    if comment_ids is None:
        width = len(str(max(len(comments) - 1, 0)))
        comment_ids = [f"{video_id}:{i:0{width}d}" for i in range(len(comments))]
    elif len(comment_ids) != len(comments):
        raise ValueError("comment_ids length must match comments")

    scores = [
        comment_cesd(stream, bundle, counting, comment_id=cid)
        for cid, stream in zip(comment_ids, comments)
    ]
    scores.sort(key=lambda s: s.comment_id)
    n = len(scores)
    if n == 0:
        video_score, zero_fraction = 0.0, 0.0
    else:
        if aggregate_mode == CONNOTATION_WEIGHTED:
            total = sum(s.score for s in scores)
        else:
            total = sum(s.term_freq for s in scores)
        video_score = total / n
        zero_fraction = sum(1 for s in scores if s.score == 0.0) / n
    return CesdReport(
        video_id=video_id,
        comment_scores=tuple(scores),
        aggregate_mode=aggregate_mode,
        counting=counting,
        video_score=video_score,
        n_comments=n,
        zero_fraction=zero_fraction,
        lexicon_hash=bundle.content_hash,
        label=label,
        category=category,
    )


def calibrate_threshold(training_reports: Sequence[CesdReport]) -> CesdThreshold:
    """Mean video score over depressive-labeled training reports."""
    if not training_reports:
        raise ValueError("calibration set is empty")
    mean = sum(r.video_score for r in training_reports) / len(training_reports)
    return CesdThreshold(
        value=mean, provenance="calibrated", calibration_set_size=len(training_reports)
    )


def fixed_threshold(value: float) -> CesdThreshold:
    return CesdThreshold(value=value, provenance="fixed")


def label_by_threshold(report: CesdReport, threshold: CesdThreshold) -> str:
    """Depressive iff the video score strictly exceeds the threshold."""
    return DEPRESSIVE if report.video_score > threshold.value else NON_DEPRESSIVE


def save_reports(path: str | Path, reports: Sequence[CesdReport]) -> None:
    """One report per line, versioned, byte-stable."""
    lines = [
        util.canonical_json({"version": REPORT_SCHEMA_VERSION, **r.to_dict()})
        for r in reports
    ]
    util.write_atomic(path, "\n".join(lines) + ("\n" if lines else ""))


def load_reports(path: str | Path) -> list[CesdReport]:
    reports = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            doc = json.loads(line)
            version = doc.get("version")
            if version != REPORT_SCHEMA_VERSION:
                raise ValueError(f"line {lineno}: unsupported report version {version!r}")
            reports.append(CesdReport.from_dict(doc))
    return reports
