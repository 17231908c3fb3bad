"""Multinomial Naive Bayes over sparse non-negative feature vectors.

Estimates are computed with Laplace smoothing and kept in log space;
fractional feature values (TF-IDF weights, lexicon densities) are
permitted, the smoothed estimator is well-defined for any non-negative
mass. Posteriors use a max-subtracted softmax so scoring stays finite
for arbitrarily large feature dimensions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from moodscreen import util
from moodscreen.features import FeatureVector
from moodscreen.labels import DEPRESSIVE, NON_DEPRESSIVE

MODEL_SCHEMA_VERSION = 1

CLASS_ORDER = (DEPRESSIVE, NON_DEPRESSIVE)


class ModelFormatError(ValueError):
    """Unreadable or unsupported model payload."""


class FeatureHashMismatch(ValueError):
    """Vector produced by a different feature pipeline than the model's."""


@dataclass(eq=False)
class NbModel:
    classes: tuple[str, ...]
    log_priors: np.ndarray  # (n_classes,)
    log_likelihoods: np.ndarray  # (n_classes, feature_dimension)
    alpha: float
    feature_dimension: int
    feature_config_hash: str | None = None

    def to_dict(self) -> dict:
        return {
            "schema_version": MODEL_SCHEMA_VERSION,
            "classes": list(self.classes),
            "alpha": self.alpha,
            "feature_dimension": self.feature_dimension,
            "feature_config_hash": self.feature_config_hash,
            "log_priors": self.log_priors.tolist(),
            "log_likelihoods": self.log_likelihoods.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "NbModel":
        version = doc.get("schema_version")
        if version != MODEL_SCHEMA_VERSION:
            raise ModelFormatError(f"unsupported model schema version: {version!r}")
        try:
            model = cls(
                classes=tuple(doc["classes"]),
                log_priors=np.asarray(doc["log_priors"], dtype=np.float64),
                log_likelihoods=np.asarray(doc["log_likelihoods"], dtype=np.float64),
                alpha=float(doc["alpha"]),
                feature_dimension=int(doc["feature_dimension"]),
                feature_config_hash=doc.get("feature_config_hash"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"corrupt model payload: {exc}") from None
        n = len(model.classes)
        if model.log_priors.shape != (n,) or model.log_likelihoods.shape != (
            n,
            model.feature_dimension,
        ):
            raise ModelFormatError("corrupt model payload: parameter shape mismatch")
        return model


@dataclass(frozen=True)
class Prediction:
    label: str
    posterior: dict[str, float]  # class -> probability, in class order


def train(
    vectors: Sequence[FeatureVector], labels: Sequence[str], alpha: float = 1.0
) -> NbModel:
    """Fit priors and smoothed per-class feature likelihoods.

    log P(j|c) = ln((alpha + mass_cj) / (alpha*D + mass_c)). Training is
    order-independent within each class; both classes must be present.
    """
    if len(vectors) != len(labels):
        raise ValueError("vectors and labels must have equal length")
    if not vectors:
        raise ValueError("training set is empty")
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    dimension = vectors[0].dimension
    if dimension < 1:
        raise ValueError("feature dimension must be >= 1")
    if any(v.dimension != dimension for v in vectors):
        raise ValueError("inconsistent feature dimensions in training set")
    hashes = {v.config_hash for v in vectors}
    if len(hashes) > 1:
        raise FeatureHashMismatch("training vectors come from different pipelines")

    class_index = {c: i for i, c in enumerate(CLASS_ORDER)}
    counts = np.zeros(len(CLASS_ORDER), dtype=np.int64)
    mass = np.zeros((len(CLASS_ORDER), dimension), dtype=np.float64)
    for vector, label in zip(vectors, labels):
        i = class_index.get(label)
        if i is None:
            raise ValueError(f"unknown label {label!r}")
        if np.any(vector.values < 0):
            raise ValueError("feature values must be non-negative")
        counts[i] += 1
        np.add.at(mass[i], vector.indices, vector.values)
    missing = [c for c, i in class_index.items() if counts[i] == 0]
    if missing:
        raise ValueError(f"training set has no documents for class(es): {missing}")

    log_priors = np.log(counts / counts.sum())
    smoothed = alpha + mass
    log_likelihoods = np.log(smoothed / smoothed.sum(axis=1, keepdims=True))
    return NbModel(
        classes=CLASS_ORDER,
        log_priors=log_priors,
        log_likelihoods=log_likelihoods,
        alpha=alpha,
        feature_dimension=dimension,
        feature_config_hash=next(iter(hashes)),
    )


def _check_vector(model: NbModel, vector: FeatureVector) -> None:
    if vector.dimension != model.feature_dimension:
        raise ValueError(
            f"vector dimension {vector.dimension} != model dimension "
            f"{model.feature_dimension}"
        )
    if (
        vector.config_hash is not None
        and model.feature_config_hash is not None
        and vector.config_hash != model.feature_config_hash
    ):
        raise FeatureHashMismatch(
            "feature vector was produced by a different pipeline than the model"
        )


def log_posterior(model: NbModel, vector: FeatureVector) -> np.ndarray:
    """Unnormalized per-class log scores; equals the log priors exactly
    for an all-zero vector."""
    _check_vector(model, vector)
    if len(vector.indices) == 0:
        return model.log_priors.copy()
    return model.log_priors + model.log_likelihoods[:, vector.indices] @ vector.values


def posteriors(model: NbModel, vector: FeatureVector) -> np.ndarray:
    scores = log_posterior(model, vector)
    shifted = np.exp(scores - scores.max())
    return shifted / shifted.sum()


def predict(model: NbModel, vector: FeatureVector) -> Prediction:
    """Argmax posterior; exact ties go to the first class in model order."""
    post = posteriors(model, vector)
    label = model.classes[int(np.argmax(post))]
    return Prediction(label=label, posterior=dict(zip(model.classes, post.tolist())))


def dumps(model: NbModel) -> str:
    return util.canonical_json(model.to_dict())


def loads(payload: str | bytes) -> NbModel:
    if isinstance(payload, bytes):
        payload = payload.decode("utf-8")
    try:
        doc = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"corrupt model payload: {exc}") from None
    if not isinstance(doc, dict):
        raise ModelFormatError("corrupt model payload: expected a JSON object")
    return NbModel.from_dict(doc)


def save_model(path: str | Path, model: NbModel) -> None:
    util.write_atomic(path, dumps(model) + "\n")


def load_model(path: str | Path) -> NbModel:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())
