"""Affine subspace tracking: particle filtering with Grassmann appearance models."""

__version__ = "0.1.0"

# Core models
from affine_tracker.core.models import (
    BoxState,
    DistanceKind,
    Frame,
    GroundTruthBox,
    MetricsReport,
    MotionParams,
    Particle,
    TrackerConfig,
    TrackRecord,
)

# Geometry and tracking
from affine_tracker.core.grassmann import AffineSubspace, LinearSubspace
from affine_tracker.core.bag import ModelBag
from affine_tracker.core.tracker import AffineSubspaceTracker, TrackState, run

# Files, evaluation, configuration
from affine_tracker.config import config_from_mapping, load_config
from affine_tracker.evaluation.metrics import evaluate, precision_curve
from affine_tracker.evaluation.synthetic import SyntheticSpec, generate_synthetic
from affine_tracker.io.pgm import load_frames
from affine_tracker.io.records import load_ground_truth, load_records, save_records

# Errors
from affine_tracker.errors import (
    DegenerateWeightsError,
    FormatError,
    InvalidInputError,
    InvalidStateError,
    ParseError,
    TrackerError,
)

__all__ = [
    # Models
    "BoxState",
    "DistanceKind",
    "Frame",
    "GroundTruthBox",
    "MetricsReport",
    "MotionParams",
    "Particle",
    "TrackerConfig",
    "TrackRecord",
    # Tracking
    "AffineSubspace",
    "LinearSubspace",
    "ModelBag",
    "AffineSubspaceTracker",
    "TrackState",
    "run",
    # Files and evaluation
    "config_from_mapping",
    "load_config",
    "evaluate",
    "precision_curve",
    "SyntheticSpec",
    "generate_synthetic",
    "load_frames",
    "load_ground_truth",
    "load_records",
    "save_records",
    # Errors
    "DegenerateWeightsError",
    "FormatError",
    "InvalidInputError",
    "InvalidStateError",
    "ParseError",
    "TrackerError",
]
