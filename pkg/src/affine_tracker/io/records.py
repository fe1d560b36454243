"""Text formats: result CSV, ground-truth boxes, matrices and bag snapshots.

- Result CSV: header ``frame,x,y,s,w,h,score``; ``x, y, s, score`` with six
  fractional digits, ``w, h`` the rounded scaled box size.
- Ground truth: no header, one ``x,y,w,h`` integer line per frame.
- Matrix: first line ``rows cols``, then one whitespace-separated row per
  line, values printed with ``%.17g``.
"""

from __future__ import annotations

import csv
import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from affine_tracker.core.bag import ModelBag
from affine_tracker.core.models import BoxState, GroundTruthBox, TrackRecord
from affine_tracker.errors import FormatError, InvalidInputError, ParseError

logger = logging.getLogger(__name__)

RECORD_HEADER = ("frame", "x", "y", "s", "w", "h", "score")


# ---------------------------------------------------------------------------
# Track records
# ---------------------------------------------------------------------------

def save_records(path: str | Path, records: Sequence[TrackRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_HEADER)
        for r in records:
            writer.writerow([
                r.frame_index,
                f"{r.state.x:.6f}",
                f"{r.state.y:.6f}",
                f"{r.state.s:.6f}",
                r.width,
                r.height,
                f"{r.score:.6f}",
            ])
    logger.info("Wrote %d records to %s", len(records), path)


def load_records(path: str | Path) -> list[TrackRecord]:
    """Parse a result CSV.  The base box size is recovered as ``w / s``.

    Raises:
        ParseError: Wrong header or a malformed row (with its line number).
    """
    source = str(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(c.strip() for c in rows[0]) != RECORD_HEADER:
        raise ParseError(f"expected header {','.join(RECORD_HEADER)}", source, line=1)

    records: list[TrackRecord] = []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(RECORD_HEADER):
            raise ParseError(f"expected 7 fields, got {len(row)}", source, line=line_no)
        try:
            frame = int(row[0])
            x, y, s = float(row[1]), float(row[2]), float(row[3])
            w, h = int(row[4]), int(row[5])
            score = float(row[6])
            state = BoxState(x=x, y=y, s=s, base_w=w / s, base_h=h / s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), source, line=line_no) from exc
        records.append(TrackRecord(frame_index=frame, state=state, score=score))
    return records


# ---------------------------------------------------------------------------
# Ground truth
# ---------------------------------------------------------------------------

def load_ground_truth(path: str | Path) -> list[GroundTruthBox]:
    """One box per non-empty line; commas or whitespace separate the fields."""
    source = str(path)
    boxes: list[GroundTruthBox] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            fields = text.replace(",", " ").split()
            if len(fields) != 4:
                raise ParseError(f"expected x,y,w,h, got {text!r}", source, line=line_no)
            try:
                x, y, w, h = (int(round(float(f))) for f in fields)
            except ValueError as exc:
                raise ParseError(str(exc), source, line=line_no) from exc
            if w <= 0 or h <= 0:
                raise ParseError(f"box size must be positive, got {w}x{h}", source, line=line_no)
            boxes.append(GroundTruthBox(x=x, y=y, w=w, h=h))
    return boxes


def save_ground_truth(path: str | Path, boxes: Sequence[GroundTruthBox]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for b in boxes:
            fh.write(f"{b.x},{b.y},{b.w},{b.h}\n")


# ---------------------------------------------------------------------------
# Matrices and bag snapshots
# ---------------------------------------------------------------------------

def write_matrix(path: str | Path, matrix: np.ndarray) -> None:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise InvalidInputError(f"expected a 2-D matrix, got shape {matrix.shape}")
    rows, cols = matrix.shape
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{rows} {cols}\n")
        for row in matrix:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def read_matrix(path: str | Path) -> np.ndarray:
    source = str(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty matrix file", source)
    try:
        rows, cols = (int(v) for v in lines[0].split())
        values = [[float(v) for v in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise FormatError(f"malformed matrix: {exc}", source) from exc
    if len(values) != rows or any(len(r) != cols for r in values):
        raise FormatError(f"matrix body does not match declared size {rows}x{cols}", source)
    return np.array(values, dtype=np.float64).reshape((rows, cols))


def save_bag_snapshot(out_dir: str | Path, bag: ModelBag) -> list[Path]:
    """One ``model_XX.txt`` per model, oldest first, holding ``[mu | U]``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for i, model in enumerate(bag.all_models()):
        target = out_dir / f"model_{i:02d}.txt"
        write_matrix(target, np.column_stack([model.origin, model.basis]))
        written.append(target)
    logger.info("Wrote %d bag models to %s", len(written), out_dir)
    return written
