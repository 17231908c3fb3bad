"""Confusion-matrix evaluation and the comment-score proxy protocol.

The proxy protocol labels each video two ways: the classifier predicts
from the transcript, while the reference label comes from thresholding
the aggregated comment score. Videos without comments carry no proxy
evidence and are excluded from the matrix (reported separately), never
imputed. The positive class is ``depressive`` everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from moodscreen import nb
from moodscreen.cesd import CesdReport, CesdThreshold, label_by_threshold, video_cesd
from moodscreen.features import FeaturePipeline
from moodscreen.labels import DEPRESSIVE
from moodscreen.text import TokenStream


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def confusion(predicted: Sequence[str], reference: Sequence[str]) -> ConfusionMatrix:
    """Standard cell counts with depressive as the positive class."""
    if len(predicted) != len(reference):
        raise ValueError("predicted and reference must have equal length")
    if not predicted:
        raise ValueError("nothing to evaluate")
    tp = fp = tn = fn = 0
    for pred, ref in zip(predicted, reference):
        if ref == DEPRESSIVE:
            if pred == DEPRESSIVE:
                tp += 1
            else:
                fn += 1
        else:
            if pred == DEPRESSIVE:
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


@dataclass(frozen=True)
class VideoRecord:
    """Per-video proxy outcome; excluded videos carry no labels."""

    video_id: str
    n_comments: int
    video_score: float
    reference: str | None
    predicted: str | None
    excluded: bool

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "n_comments": self.n_comments,
            "video_score": self.video_score,
            "reference": self.reference,
            "predicted": self.predicted,
            "excluded": self.excluded,
        }


@dataclass(frozen=True)
class ProxyResult:
    matrix: ConfusionMatrix
    records: tuple[VideoRecord, ...]
    excluded: int
    threshold: CesdThreshold

    @property
    def accuracy(self) -> float:
        return self.matrix.accuracy


def proxy_evaluate(
    model: nb.NbModel,
    videos: Sequence[tuple[str, TokenStream, Sequence[TokenStream]]],
    pipeline: FeaturePipeline,
    threshold: CesdThreshold,
    aggregate_mode: str = "connotation_weighted",
    counting: str = "presence",
) -> ProxyResult:
    """Compare classifier predictions against comment-threshold labels.

    ``videos`` yields (video_id, transcript stream, comment streams).
    The pipeline's bundle also scores the comments, so reference and
    prediction share one lexicon.
    """
    if (
        model.feature_config_hash is not None
        and model.feature_config_hash != pipeline.config_hash
    ):
        raise nb.FeatureHashMismatch(
            "model was trained with a different feature pipeline"
        )
    records: list[VideoRecord] = []
    predicted_labels: list[str] = []
    reference_labels: list[str] = []
    excluded = 0
    for video_id, transcript, comments in videos:
        report = video_cesd(
            video_id, comments, pipeline.bundle, aggregate_mode, counting
        )
        if report.n_comments == 0:
            excluded += 1
            records.append(
                VideoRecord(
                    video_id=video_id,
                    n_comments=0,
                    video_score=0.0,
                    reference=None,
                    predicted=None,
                    excluded=True,
                )
            )
            continue
        reference = label_by_threshold(report, threshold)
        predicted = nb.predict(model, pipeline.vector(transcript)).label
        records.append(
            VideoRecord(
                video_id=video_id,
                n_comments=report.n_comments,
                video_score=report.video_score,
                reference=reference,
                predicted=predicted,
                excluded=False,
            )
        )
        reference_labels.append(reference)
        predicted_labels.append(predicted)
    matrix = (
        confusion(predicted_labels, reference_labels)
        if predicted_labels
        else ConfusionMatrix()
    )
    return ProxyResult(
        matrix=matrix, records=tuple(records), excluded=excluded, threshold=threshold
    )


@dataclass(frozen=True)
class CategoryStats:
    category: str
    n_videos: int
    mean_score: float
    min_score: float
    max_score: float
    score_range: float
    zero_comment_fraction: float

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "n_videos": self.n_videos,
            "mean_score": self.mean_score,
            "min_score": self.min_score,
            "max_score": self.max_score,
            "score_range": self.score_range,
            "zero_comment_fraction": self.zero_comment_fraction,
        }


def category_stats(
    groups: Mapping[str, Sequence[CesdReport]]
) -> list[CategoryStats]:
    """Score spread per category plus the pooled fraction of zero-score
    comments across each group."""
    out: list[CategoryStats] = []
    for category, reports in groups.items():
        if not reports:
            raise ValueError(f"category {category!r} has no reports")
        scores = [r.video_score for r in reports]
        total_comments = sum(r.n_comments for r in reports)
        zero_comments = sum(
            sum(1 for c in r.comment_scores if c.score == 0.0) for r in reports
        )
        out.append(
            CategoryStats(
                category=category,
                n_videos=len(reports),
                mean_score=sum(scores) / len(scores),
                min_score=min(scores),
                max_score=max(scores),
                score_range=max(scores) - min(scores),
                zero_comment_fraction=(
                    zero_comments / total_comments if total_comments else 0.0
                ),
            )
        )
    return out


def plot_data_rows(groups: Mapping[str, Sequence[CesdReport]]) -> list[str]:
    """Tab-separated per-video score rows for external plotting."""
    rows = ["category\tvideo_id\tvideo_score\tzero_fraction"]
    for category, reports in groups.items():
        for r in reports:
            rows.append(f"{category}\t{r.video_id}\t{r.video_score!r}\t{r.zero_fraction!r}")
    return rows
