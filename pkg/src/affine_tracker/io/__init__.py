"""Frame ingestion and text formats."""

from affine_tracker.io.pgm import load_frames, read_pgm, write_overlays, write_pgm
from affine_tracker.io.records import (
    load_ground_truth,
    load_records,
    read_matrix,
    save_bag_snapshot,
    save_ground_truth,
    save_records,
    write_matrix,
)

__all__ = [
    "load_frames",
    "read_pgm",
    "write_overlays",
    "write_pgm",
    "load_ground_truth",
    "load_records",
    "read_matrix",
    "save_bag_snapshot",
    "save_ground_truth",
    "save_records",
    "write_matrix",
]
