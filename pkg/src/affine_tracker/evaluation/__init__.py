"""Tracking metrics and synthetic benchmark sequences."""

from affine_tracker.evaluation.metrics import (
    DEFAULT_THRESHOLD,
    center_location_errors,
    evaluate,
    precision_curve,
)
from affine_tracker.evaluation.synthetic import (
    SyntheticSequence,
    SyntheticSpec,
    generate_synthetic,
    render_sequence,
)

__all__ = [
    "DEFAULT_THRESHOLD",
    "center_location_errors",
    "evaluate",
    "precision_curve",
    "SyntheticSequence",
    "SyntheticSpec",
    "generate_synthetic",
    "render_sequence",
]
