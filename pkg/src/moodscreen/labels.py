"""Canonical class labels used across the pipeline."""

DEPRESSIVE = "depressive"
NON_DEPRESSIVE = "non_depressive"

LABELS = (DEPRESSIVE, NON_DEPRESSIVE)


def validate_label(value: str) -> str:
    if value not in LABELS:
        raise ValueError(f"unknown label {value!r}, expected one of {LABELS}")
    return value
