"""Tests for the synthetic sequence generator."""

import numpy as np
import pytest

from affine_tracker.errors import InvalidInputError
from affine_tracker.evaluation.synthetic import (
    OCCLUDER_LEVEL,
    SyntheticSpec,
    generate_synthetic,
    render_sequence,
    trajectory,
)
from affine_tracker.io.pgm import load_frames
from affine_tracker.io.records import load_ground_truth

SMALL = SyntheticSpec(length=20, frame_w=120, frame_h=90, object_w=16, object_h=16,
                      start_x=10.0, start_y=20.0)


class TestTrajectory:
    """Object paths of the synthetic sequences."""

    def test_linear_positions(self):
        """The linear path moves one pixel right and a quarter pixel down per frame."""
        positions = trajectory(SMALL)
        assert positions[0] == (10, 20)
        assert positions[4] == (14, 21)
        assert len(positions) == 20

    def test_sinusoidal_starts_at_origin_and_swings(self):
        """The sinusoidal path swings by its amplitude around the start."""
        spec = SyntheticSpec(length=40, trajectory="sinusoidal", amplitude=20.0)
        ys = [y for _, y in trajectory(spec)]
        assert ys[0] == 100
        assert ys[10] == 120
        assert ys[30] == 80

    def test_object_leaving_the_frame_rejected(self):
        """A path that leaves the canvas is refused."""
        with pytest.raises(InvalidInputError):
            trajectory(SyntheticSpec(length=400))

    @pytest.mark.parametrize(
        "overrides",
        [{"length": 0}, {"trajectory": "spiral"}, {"noise_std": -1.0}, {"object_w": 1}],
    )
    def test_invalid_spec_rejected(self, overrides):
        """Invalid lengths, kinds, noise and sizes fail validation."""
        params = {**SMALL.__dict__, **overrides}
        with pytest.raises(InvalidInputError):
            SyntheticSpec(**params).validate()


class TestRender:
    """Frame rendering and writing to disk."""

    def test_same_seed_same_frames(self):
        """One seed renders identical frames."""
        a, b = render_sequence(SMALL), render_sequence(SMALL)
        for fa, fb in zip(a.frames, b.frames):
            np.testing.assert_array_equal(fa.pixels, fb.pixels)

    def test_object_constant_without_noise_or_illumination(self):
        """Without noise the object crop never changes."""
        seq = render_sequence(SMALL)
        crops = [
            f.pixels[t.y: t.y + t.h, t.x: t.x + t.w] for f, t in zip(seq.frames, seq.truth)
        ]
        for crop in crops[1:]:
            np.testing.assert_array_equal(crop, crops[0])

    def test_background_range(self):
        """Background pixels stay within their texture range."""
        frame = render_sequence(SMALL).frames[0].pixels
        assert frame[80:, :].min() >= 60 and frame[80:, :].max() <= 190

    def test_occluder_covers_lower_half(self):
        """The occluder covers the lower half of the object in its frame range only."""
        spec = SyntheticSpec(**{**SMALL.__dict__, "occluder": True})
        seq = render_sequence(spec)
        occluded = list(spec.occluded_range)
        assert occluded == list(range(6, 16))
        t = seq.truth[occluded[0] - 1]
        lower = seq.frames[occluded[0] - 1].pixels[t.y + 8: t.y + 16, t.x: t.x + 16]
        assert np.all(lower == OCCLUDER_LEVEL)
        before = seq.truth[occluded[0] - 2]
        assert not np.all(
            seq.frames[occluded[0] - 2].pixels[before.y + 8: before.y + 16] == OCCLUDER_LEVEL
        )

    def test_noise_changes_pixels(self):
        """Sensor noise perturbs the rendered pixels."""
        clean = render_sequence(SMALL)
        noisy = render_sequence(SyntheticSpec(**{**SMALL.__dict__, "noise_std": 5.0}))
        np.testing.assert_array_equal(clean.frames[0].pixels.shape, noisy.frames[0].pixels.shape)
        assert np.any(clean.frames[0].pixels != noisy.frames[0].pixels)

    def test_generate_writes_frames_and_truth(self, tmp_path):
        """generate_synthetic writes numbered PGMs and a readable ground truth."""
        seq = generate_synthetic(SMALL, tmp_path)
        frames = load_frames(tmp_path)
        assert [f.name for f in frames][:2] == ["frame_0001.pgm", "frame_0002.pgm"]
        np.testing.assert_array_equal(frames[5].pixels, seq.frames[5].pixels)
        assert load_ground_truth(tmp_path / "groundtruth.txt") == list(seq.truth)
