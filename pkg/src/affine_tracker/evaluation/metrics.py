"""Center location error and precision.

A box center is its top-left corner plus half its size.  A frame counts
as a hit when its center location error is at most the threshold.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from affine_tracker.core.models import GroundTruthBox, MetricsReport, TrackRecord
from affine_tracker.errors import InvalidInputError

DEFAULT_THRESHOLD = 20.0

_Boxlike = TrackRecord | GroundTruthBox


def center_location_errors(
    records: Sequence[_Boxlike], truth: Sequence[_Boxlike]
) -> np.ndarray:
    """Per-frame Euclidean distance between predicted and true centers."""
    if len(records) != len(truth):
        raise InvalidInputError(
            f"{len(records)} records but {len(truth)} ground-truth boxes"
        )
    if not records:
        return np.zeros(0)
    predicted = np.array([r.center for r in records], dtype=np.float64)
    actual = np.array([t.center for t in truth], dtype=np.float64)
    return np.hypot(predicted[:, 0] - actual[:, 0], predicted[:, 1] - actual[:, 1])


def evaluate(
    records: Sequence[_Boxlike],
    truth: Sequence[_Boxlike],
    threshold: float = DEFAULT_THRESHOLD,
) -> MetricsReport:
    """Mean CLE and precision at ``threshold`` pixels."""
    if threshold < 0:
        raise InvalidInputError(f"threshold must be >= 0, got {threshold}")
    errors = center_location_errors(records, truth)
    if errors.size == 0:
        return MetricsReport(0.0, 0.0, float(threshold), 0, ())
    return MetricsReport(
        mean_cle=float(errors.mean()),
        precision=float(np.count_nonzero(errors <= threshold)) / errors.size,
        threshold=float(threshold),
        frames_evaluated=int(errors.size),
        per_frame_errors=tuple(float(e) for e in errors),
    )


def precision_curve(
    records: Sequence[_Boxlike],
    truth: Sequence[_Boxlike],
    thresholds: Sequence[float] | None = None,
) -> list[tuple[float, float]]:
    """``(threshold, precision)`` pairs, integer thresholds 0..50 by default."""
    levels = list(range(51)) if thresholds is None else list(thresholds)
    errors = center_location_errors(records, truth)
    if errors.size == 0:
        return [(float(t), 0.0) for t in levels]
    return [
        (float(t), float(np.count_nonzero(errors <= t)) / errors.size) for t in levels
    ]
