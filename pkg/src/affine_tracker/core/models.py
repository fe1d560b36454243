"""Core data models for the affine subspace tracker.

States, particles, frames and results are small immutable records.
Pixel data and feature vectors are numpy arrays; a *patch* is simply a
1-D float64 array of length ``PATCH_DIM`` and is not wrapped.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from affine_tracker.errors import InvalidInputError

# Candidate regions are resampled to this many rows x columns.
PATCH_SHAPE: tuple[int, int] = (32, 32)
PATCH_DIM = PATCH_SHAPE[0] * PATCH_SHAPE[1]


def round_half_up(value: float) -> int:
    """Round to the nearest integer, halves away from -inf (``floor(v + 0.5)``)."""
    return int(math.floor(value + 0.5))


# ---------------------------------------------------------------------------
# Enums
# ---------------------------------------------------------------------------

class DistanceKind(Enum):
    """How a candidate subspace is compared with a bag model."""

    AFFINE = "affine"          # geodesic + alpha * Mahalanobis origin term (default)
    PROJECTION = "projection"  # projection distance + alpha * Mahalanobis origin term
    KL = "kl"                  # symmetric KL between the induced Gaussians
    LINEAR = "linear"          # origins fixed at 0, uncentered bases, geodesic only


# ---------------------------------------------------------------------------
# State and particles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoxState:
    """Object state: top-left corner, scale, and the run's base box size.

    The box covers ``round(base_w * s) x round(base_h * s)`` pixels with its
    top-left corner at ``(round(x), round(y))``.
    """

    x: float
    y: float
    s: float = 1.0
    base_w: float = 32.0
    base_h: float = 32.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.s, self.base_w, self.base_h)):
            raise InvalidInputError(f"BoxState fields must be finite: {self}")
        if self.s <= 0.0:
            raise InvalidInputError(f"scale must be > 0, got {self.s}")
        if self.width < 2 or self.height < 2:
            raise InvalidInputError(
                f"scaled box must be at least 2x2 pixels, got {self.width}x{self.height}"
            )

    @classmethod
    def from_box(cls, x: float, y: float, w: float, h: float) -> "BoxState":
        """State for an ``x,y,w,h`` box at scale 1 (the box becomes the base size)."""
        return cls(x=float(x), y=float(y), s=1.0, base_w=float(w), base_h=float(h))

    @property
    def width(self) -> int:
        return round_half_up(self.base_w * self.s)

    @property
    def height(self) -> int:
        return round_half_up(self.base_h * self.s)

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.width / 2.0, self.y + self.height / 2.0)

    def moved(self, x: float, y: float, s: float) -> "BoxState":
        return dataclasses.replace(self, x=float(x), y=float(y), s=float(s))


@dataclass(frozen=True)
class Particle:
    """A candidate state with its importance weight."""

    state: BoxState
    weight: float = 1.0


@dataclass(frozen=True)
class MotionParams:
    """Brownian motion model of the particle filter (diagonal covariance).

    The defaults are engineering choices for 320x240 footage; all are
    overridable from the CLI or a config file.
    """

    std_x: float = 4.0
    std_y: float = 4.0
    std_s: float = 0.01
    n_particles: int = 600
    s_min: float = 0.5
    s_max: float = 2.0

    def validate(self) -> None:
        for name in ("std_x", "std_y", "std_s"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise InvalidInputError(f"{name} must be finite and >= 0, got {value}")
        if self.n_particles < 1:
            raise InvalidInputError(f"n_particles must be >= 1, got {self.n_particles}")
        if not 0.0 < self.s_min <= self.s_max:
            raise InvalidInputError(
                f"scale range must satisfy 0 < s_min <= s_max, got [{self.s_min}, {self.s_max}]"
            )


# ---------------------------------------------------------------------------
# Frames and results
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Frame:
    """An 8-bit grayscale image, ``pixels`` shaped ``(height, width)``.

    ``index`` is the 1-based frame number; ``name`` is the source file
    name when the frame was loaded from disk.
    """

    pixels: np.ndarray
    index: int = 1
    name: str = ""

    def __post_init__(self) -> None:
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 2:
            raise InvalidInputError(f"frame pixels must be 2-D, got shape {pixels.shape}")
        if pixels.dtype != np.uint8:
            if pixels.size and (pixels.min() < 0 or pixels.max() > 255):
                raise InvalidInputError("frame pixels must lie in 0..255")
            pixels = pixels.astype(np.uint8)
        object.__setattr__(self, "pixels", pixels)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])


@dataclass(frozen=True)
class TrackRecord:
    """Per-frame estimate: the selected state and its aggregated likelihood."""

    frame_index: int
    state: BoxState
    score: float = 0.0

    @property
    def width(self) -> int:
        return self.state.width

    @property
    def height(self) -> int:
        return self.state.height

    @property
    def center(self) -> tuple[float, float]:
        return self.state.center


@dataclass(frozen=True)
class GroundTruthBox:
    """One ground-truth line: integer top-left corner and size."""

    x: int
    y: int
    w: int
    h: int

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)


@dataclass(frozen=True)
class MetricsReport:
    """Center-location-error summary over a run.

    Attributes:
        mean_cle: Mean Euclidean distance between box centers (pixels).
        precision: Fraction of frames with CLE <= threshold.
        threshold: The precision threshold in pixels.
        frames_evaluated: Number of frames compared.
        per_frame_errors: CLE for every evaluated frame, in order.
    """

    mean_cle: float
    precision: float
    threshold: float
    frames_evaluated: int
    per_frame_errors: tuple[float, ...] = field(default_factory=tuple)

    @property
    def max_cle(self) -> float:
        return max(self.per_frame_errors) if self.per_frame_errors else 0.0

    def tail(self, frames: int) -> "MetricsReport":
        """The same metrics restricted to the last ``frames`` frames."""
        if frames < 1:
            raise InvalidInputError(f"tail window must be >= 1, got {frames}")
        errors = self.per_frame_errors[-frames:]
        if not errors:
            return MetricsReport(0.0, 0.0, self.threshold, 0, ())
        hits = sum(1 for e in errors if e <= self.threshold)
        return MetricsReport(
            mean_cle=float(sum(errors) / len(errors)),
            precision=hits / len(errors),
            threshold=self.threshold,
            frames_evaluated=len(errors),
            per_frame_errors=tuple(errors),
        )


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrackerConfig:
    """All tunables of one tracking run.

    Attributes:
        history_length: P, accepted patches kept for candidate subspaces.
        subspace_dim: n, basis vectors per affine subspace.
        bag_size: k, models kept in the bag.
        update_period: W, frames between bag insertions.
        alpha: Mixing weight of the Mahalanobis origin term.
        sigma: Likelihood scale.
        motion: Particle filter parameters.
        seed: Seed of the run's RandomSource.
        distance: Subspace distance used for the likelihoods.
        kl_sigma2: Isotropic noise variance of the KL distance.
        normalize: Scale pixel features to [0, 1] (divide by 255).
    """

    history_length: int = 5
    subspace_dim: int = 3
    bag_size: int = 10
    update_period: int = 5
    alpha: float = 1.0
    sigma: float = 0.1
    motion: MotionParams = field(default_factory=MotionParams)
    seed: int = 0
    distance: DistanceKind = DistanceKind.AFFINE
    kl_sigma2: float = 1.0
    normalize: bool = True

    def validate(self) -> None:
        if self.history_length < 2:
            raise InvalidInputError(f"history_length must be >= 2, got {self.history_length}")
        if not 1 <= self.subspace_dim <= self.history_length - 1:
            raise InvalidInputError(
                f"subspace_dim must satisfy 1 <= n <= P - 1 "
                f"(n={self.subspace_dim}, P={self.history_length})"
            )
        if self.bag_size < 1:
            raise InvalidInputError(f"bag_size must be >= 1, got {self.bag_size}")
        if self.update_period < 1:
            raise InvalidInputError(f"update_period must be >= 1, got {self.update_period}")
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise InvalidInputError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise InvalidInputError(f"sigma must be finite and > 0, got {self.sigma}")
        if not (math.isfinite(self.kl_sigma2) and self.kl_sigma2 > 0.0):
            raise InvalidInputError(f"kl_sigma2 must be finite and > 0, got {self.kl_sigma2}")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidInputError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        self.motion.validate()

    def with_overrides(self, **changes: Any) -> "TrackerConfig":
        """Copy with fields replaced; ``None`` values are ignored."""
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})
