"""Shared fixtures for the test suite."""

import numpy as np
import pytest

from affine_tracker.core.grassmann import AffineSubspace, LinearSubspace
from affine_tracker.core.models import Frame, MotionParams, TrackerConfig
from affine_tracker.evaluation.synthetic import SyntheticSpec, render_sequence


def random_basis(rng: np.random.Generator, dim: int, rank: int) -> np.ndarray:
    """Orthonormal ``dim x rank`` basis from numpy's QR (independent of our code)."""
    q, _ = np.linalg.qr(rng.standard_normal((dim, rank)))
    return q[:, :rank]


def random_affine(rng: np.random.Generator, dim: int, rank: int) -> AffineSubspace:
    return AffineSubspace(
        origin=rng.standard_normal(dim),
        subspace=LinearSubspace(random_basis(rng, dim, rank)),
    )


def textured_frame(rng: np.random.Generator, width: int = 80, height: int = 60) -> Frame:
    return Frame(pixels=rng.integers(0, 256, size=(height, width), dtype=np.uint8))


@pytest.fixture
def np_rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_config():
    """A fast tracker configuration for unit-level runs."""
    return TrackerConfig(motion=MotionParams(n_particles=60), seed=3)


@pytest.fixture(scope="session")
def short_sequence():
    """30-frame noisy linear sequence on a small canvas."""
    spec = SyntheticSpec(
        length=30,
        frame_w=160,
        frame_h=120,
        object_w=32,
        object_h=32,
        start_x=30.0,
        start_y=40.0,
        noise_std=2.0,
        seed=5,
    )
    return render_sequence(spec)
