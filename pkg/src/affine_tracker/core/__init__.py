"""Core components: numerics, subspace geometry, appearance, motion, bag, tracker."""

from affine_tracker.core.models import (
    PATCH_DIM,
    PATCH_SHAPE,
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
from affine_tracker.core.numerics import RandomSource, sym_eig, thin_svd
from affine_tracker.core.grassmann import (
    AffineSubspace,
    LinearSubspace,
    affine_distance,
    geodesic_distance,
    kl_distance,
    principal_angles,
    projection_distance,
    subspace_distance,
)
from affine_tracker.core.appearance import build_affine_subspace, extract_patch
from affine_tracker.core.motion import diffuse, init_particles, resample
from affine_tracker.core.bag import ModelBag
from affine_tracker.core.tracker import (
    AffineSubspaceTracker,
    TrackState,
    aggregate,
    candidate_subspace,
    estimate,
    likelihoods,
)

__all__ = [
    # Models
    "PATCH_DIM",
    "PATCH_SHAPE",
    "BoxState",
    "DistanceKind",
    "Frame",
    "GroundTruthBox",
    "MetricsReport",
    "MotionParams",
    "Particle",
    "TrackerConfig",
    "TrackRecord",
    # Numerics
    "RandomSource",
    "sym_eig",
    "thin_svd",
    # Geometry
    "AffineSubspace",
    "LinearSubspace",
    "affine_distance",
    "geodesic_distance",
    "kl_distance",
    "principal_angles",
    "projection_distance",
    "subspace_distance",
    # Appearance and motion
    "build_affine_subspace",
    "extract_patch",
    "diffuse",
    "init_particles",
    "resample",
    # Tracking
    "ModelBag",
    "AffineSubspaceTracker",
    "TrackState",
    "aggregate",
    "candidate_subspace",
    "estimate",
    "likelihoods",
]
