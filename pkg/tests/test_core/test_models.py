"""Tests for the core records and the tracker configuration."""

import dataclasses

import numpy as np
import pytest

from affine_tracker.core.models import (
    BoxState,
    Frame,
    MotionParams,
    TrackerConfig,
    TrackRecord,
    round_half_up,
)
from affine_tracker.errors import InvalidInputError


@pytest.mark.parametrize(
    "value, expected", [(0.5, 1), (1.5, 2), (2.4999, 2), (-0.5, 0), (-1.5, -1), (-1.6, -2)]
)
def test_round_half_up(value, expected):
    """Halves round toward positive infinity."""
    assert round_half_up(value) == expected


class TestBoxState:
    """Particle state with a fixed base box size."""

    def test_from_box(self):
        """A box at scale 1 keeps its size and reports its center."""
        state = BoxState.from_box(10, 20, 40, 30)
        assert (state.width, state.height) == (40, 30)
        assert state.center == (30.0, 35.0)

    def test_scaled_size_is_rounded(self):
        """Scaled width and height round half up."""
        state = BoxState(x=0, y=0, s=1.5, base_w=5.0, base_h=3.0)
        assert (state.width, state.height) == (8, 5)

    def test_moved_keeps_base_size(self):
        """Moving keeps the base size and applies the new scale."""
        state = BoxState.from_box(1, 2, 10, 10).moved(4, 5, 2.0)
        assert (state.x, state.y, state.s, state.width) == (4.0, 5.0, 2.0, 20)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"x": float("nan"), "y": 0.0},
            {"x": 0.0, "y": 0.0, "s": 0.0},
            {"x": 0.0, "y": 0.0, "base_w": 1.0},
        ],
    )
    def test_invalid_state_rejected(self, kwargs):
        """NaN positions, zero scale and degenerate base sizes are refused."""
        with pytest.raises(InvalidInputError):
            BoxState(**kwargs)

    def test_frozen(self):
        """States are immutable."""
        with pytest.raises(dataclasses.FrozenInstanceError):
            BoxState.from_box(0, 0, 4, 4).x = 1.0


class TestFrame:
    """Grayscale frame validation."""

    def test_integer_pixels_converted(self):
        """Integer pixel arrays are stored as uint8."""
        frame = Frame(pixels=np.array([[0, 255], [10, 20]]))
        assert frame.pixels.dtype == np.uint8
        assert (frame.width, frame.height) == (2, 2)

    @pytest.mark.parametrize("pixels", [np.zeros(4), np.array([[0, 256]]), np.array([[-1, 0]])])
    def test_invalid_pixels_rejected(self, pixels):
        """Non-2-D or out-of-range pixels are refused."""
        with pytest.raises(InvalidInputError):
            Frame(pixels=pixels)


class TestTrackerConfig:
    """Defaults and validation of the tracker configuration."""

    def test_defaults_are_valid(self):
        """The defaults validate and match the documented values."""
        config = TrackerConfig()
        config.validate()
        assert (config.history_length, config.subspace_dim) == (5, 3)
        assert (config.bag_size, config.update_period) == (10, 5)
        assert config.motion.n_particles == 600

    @pytest.mark.parametrize(
        "changes",
        [
            {"history_length": 1, "subspace_dim": 1},
            {"subspace_dim": 0},
            {"subspace_dim": 5},
            {"bag_size": 0},
            {"update_period": 0},
            {"alpha": -0.1},
            {"sigma": float("inf")},
            {"kl_sigma2": 0.0},
            {"seed": 2 ** 64},
            {"motion": MotionParams(n_particles=0)},
            {"motion": MotionParams(std_x=-1.0)},
            {"motion": MotionParams(s_min=2.0, s_max=1.0)},
        ],
    )
    def test_invalid_values_rejected(self, changes):
        """Each out-of-range field fails validation."""
        with pytest.raises(InvalidInputError):
            dataclasses.replace(TrackerConfig(), **changes).validate()


def test_track_record_delegates_geometry():
    """A record exposes the size and center of its state."""
    record = TrackRecord(frame_index=3, state=BoxState.from_box(0, 0, 10, 20), score=0.4)
    assert (record.width, record.height, record.center) == (10, 20, (5.0, 10.0))
