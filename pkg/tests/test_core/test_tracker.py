"""Tests for the decision rules and the tracking loop."""

import logging
import math

import numpy as np
import pytest

from affine_tracker.core.appearance import extract_patch
from affine_tracker.core.models import (
    BoxState,
    DistanceKind,
    Frame,
    MotionParams,
    Particle,
    TrackerConfig,
)
from affine_tracker.core.tracker import (
    AffineSubspaceTracker,
    aggregate,
    candidate_subspace,
    estimate,
    likelihoods,
    likelihoods_from_distances,
    run,
)
from affine_tracker.errors import InvalidInputError, InvalidStateError
from affine_tracker.evaluation.metrics import evaluate
from tests.conftest import random_affine, textured_frame

INIT = BoxState.from_box(20, 15, 32, 32)


def _particles(count: int) -> list[Particle]:
    return [Particle(state=INIT.moved(float(i), 0.0, 1.0)) for i in range(count)]


class TestLikelihoods:
    """Distances turned into normalized likelihoods."""

    def test_worked_example(self):
        """Distances 0, 0.1, 0.2 at sigma 0.1 give weights proportional to 1, e^-1, e^-2."""
        p = likelihoods_from_distances(np.array([0.0, 0.1, 0.2]), 0.1)
        z = 1.0 + math.exp(-1.0) + math.exp(-2.0)
        np.testing.assert_allclose(p, [1.0 / z, math.exp(-1.0) / z, math.exp(-2.0) / z])

    def test_shift_invariant(self):
        """Adding a constant to every distance changes nothing."""
        d = np.array([3.0, 1.0, 2.0])
        np.testing.assert_allclose(
            likelihoods_from_distances(d, 0.5), likelihoods_from_distances(d + 1000.0, 0.5)
        )

    def test_large_distances_do_not_underflow(self):
        """Huge distances still normalize to one."""
        p = likelihoods_from_distances(np.array([5000.0, 5000.5]), 0.01)
        assert p.sum() == pytest.approx(1.0)
        assert p[0] == pytest.approx(1.0)

    def test_infinite_distance_gets_zero(self):
        """An infinite distance gets zero likelihood."""
        p = likelihoods_from_distances(np.array([1.0, np.inf, 1.0]), 1.0)
        np.testing.assert_allclose(p, [0.5, 0.0, 0.5])

    def test_no_finite_distance_is_uniform(self):
        """With no finite distance every particle gets 1/N."""
        p = likelihoods_from_distances(np.array([np.inf, np.nan]), 1.0)
        np.testing.assert_allclose(p, [0.5, 0.5])

    @pytest.mark.parametrize("sigma", [0.0, -1.0])
    def test_non_positive_sigma_rejected(self, sigma):
        """sigma must be positive."""
        with pytest.raises(InvalidInputError):
            likelihoods_from_distances(np.array([1.0]), sigma)

    def test_empty_rejected(self):
        """An empty distance vector is refused."""
        with pytest.raises(InvalidInputError):
            likelihoods_from_distances(np.array([]), 1.0)

    def test_exact_model_match_wins(self, np_rng):
        """The candidate equal to the model gets the highest likelihood."""
        model = random_affine(np_rng, 20, 2)
        others = [random_affine(np_rng, 20, 2) for _ in range(3)]
        p = likelihoods([others[0], model, *others[1:]], model, alpha=1.0, sigma=0.1)
        assert int(np.argmax(p)) == 1
        assert p.sum() == pytest.approx(1.0)


class TestAggregateAndEstimate:
    """Sum-rule aggregation and the argmax estimate."""

    def test_sum_rule(self):
        """Per-model likelihoods add elementwise."""
        combined = aggregate([np.array([0.2, 0.8]), np.array([0.6, 0.4])])
        np.testing.assert_allclose(combined, [0.8, 1.2])

    def test_empty_bag_rejected(self):
        """Aggregating over no models is a state error."""
        with pytest.raises(InvalidStateError):
            aggregate([])

    def test_aggregate_length_mismatch_rejected(self):
        """Per-model vectors must have equal length."""
        with pytest.raises(InvalidInputError):
            aggregate([np.ones(2), np.ones(3)])

    def test_estimate_picks_argmax(self):
        """The estimate is the particle with the largest combined likelihood."""
        index, record = estimate(np.array([0.1, 0.7, 0.2]), _particles(3), frame_index=9)
        assert index == 1
        assert record.state.x == INIT.x + 1.0
        assert record.frame_index == 9
        assert record.score == pytest.approx(0.7)

    def test_ties_go_to_lowest_index(self):
        """Ties resolve to the lowest particle index."""
        index, _ = estimate(np.array([0.1, 0.5, 0.5]), _particles(3))
        assert index == 1

    def test_estimate_length_mismatch_rejected(self):
        """Likelihoods and particles must have equal length."""
        with pytest.raises(InvalidInputError):
            estimate(np.array([1.0]), _particles(2))


class TestCandidateSubspace:
    """Subspace of the accepted history plus one candidate."""

    def test_history_plus_candidate(self, np_rng):
        """The origin averages the history and the candidate."""
        history = [np_rng.standard_normal(16) for _ in range(5)]
        candidate = np_rng.standard_normal(16)
        model = candidate_subspace(history, candidate, 3)
        expected = np.mean(np.stack([*history, candidate]), axis=0)
        np.testing.assert_allclose(model.origin, expected)
        assert model.rank == 3

    def test_empty_history_rejected(self):
        """A candidate needs at least one history patch."""
        with pytest.raises(InvalidInputError):
            candidate_subspace([], np.zeros(4), 1)


class TestTracker:
    """Warm-up, per-frame step and the full tracking loop."""

    @pytest.fixture
    def still_config(self):
        """Twenty particles that never move."""
        motion = MotionParams(std_x=0.0, std_y=0.0, std_s=0.0, n_particles=20)
        return TrackerConfig(motion=motion, seed=1)

    def test_static_scene_without_motion_is_a_fixed_point(self, np_rng, still_config):
        """A still scene with no diffusion keeps the initial box."""
        frame = textured_frame(np_rng)
        records = AffineSubspaceTracker(still_config).run([frame] * 12, INIT)
        assert len(records) == 12
        assert all(r.state == INIT for r in records)
        assert [r.frame_index for r in records] == list(range(1, 13))

    def test_warm_up_records(self, np_rng, small_config):
        """Warm-up frames report the initial box with score 0."""
        frames = [textured_frame(np_rng) for _ in range(8)]
        records = AffineSubspaceTracker(small_config).run(frames, INIT)
        for record in records[: small_config.history_length]:
            assert record.state == INIT
            assert record.score == 0.0

    def test_exactly_history_length_frames(self, np_rng, small_config):
        """P frames give P warm-up records and a one-model bag."""
        tracker = AffineSubspaceTracker(small_config)
        frames = [textured_frame(np_rng) for _ in range(small_config.history_length)]
        records = tracker.run(frames, INIT)
        assert len(records) == small_config.history_length
        assert len(tracker.last_state.bag) == 1

    def test_too_few_frames_rejected(self, np_rng, small_config):
        """Fewer than P frames is an input error."""
        frames = [textured_frame(np_rng) for _ in range(small_config.history_length - 1)]
        with pytest.raises(InvalidInputError):
            AffineSubspaceTracker(small_config).run(frames, INIT)

    def test_identical_warm_up_warns(self, np_rng, still_config, caplog):
        """A constant warm-up logs a rank-0 warning."""
        frame = textured_frame(np_rng)
        with caplog.at_level(logging.WARNING, logger="affine_tracker.core.tracker"):
            AffineSubspaceTracker(still_config).run([frame] * 6, INIT)
        assert "rank 0" in caplog.text

    def test_bag_grows_every_update_period(self, np_rng):
        """The bag gains a model every update period until it is full."""
        motion = MotionParams(n_particles=20)
        config = TrackerConfig(motion=motion, bag_size=3, update_period=2, seed=2)
        frames = [textured_frame(np_rng) for _ in range(12)]
        tracker = AffineSubspaceTracker(config)
        state, _ = tracker.initialise(frames[:5], INIT)
        sizes = []
        for frame in frames[5:]:
            state, _ = tracker.step(state, frame)
            sizes.append(len(state.bag))
        # Seeded at frame 5; inserts at 7, 9, then full.
        assert sizes == [1, 2, 2, 3, 3, 3, 3]

    def test_step_does_not_mutate_its_input(self, np_rng, small_config):
        """step is pure: the same state twice gives the same record."""
        frames = [textured_frame(np_rng) for _ in range(6)]
        tracker = AffineSubspaceTracker(small_config)
        state, _ = tracker.initialise(frames[:5], INIT)
        rng_before = state.rng.state
        _, first = tracker.step(state, frames[5])
        _, second = tracker.step(state, frames[5])
        assert first == second
        assert state.rng.state == rng_before
        assert state.frame_index == 5

    def test_particle_weights_are_normalized_every_frame(self, np_rng, small_config):
        """After each step the particle weights are non-negative and sum to 1."""
        frames = [textured_frame(np_rng) for _ in range(10)]
        tracker = AffineSubspaceTracker(small_config)
        state, _ = tracker.initialise(frames[:5], INIT)
        for frame in frames[5:]:
            state, _ = tracker.step(state, frame)
            weights = np.array([p.weight for p in state.particles])
            assert len(weights) == small_config.motion.n_particles
            assert np.all(weights >= 0.0)
            assert abs(weights.sum() - 1.0) <= 1e-12

    def test_history_holds_only_accepted_patches(self, np_rng, small_config):
        """Each step drops the oldest patch and appends the one at the estimate."""
        frames = [textured_frame(np_rng) for _ in range(10)]
        tracker = AffineSubspaceTracker(small_config)
        state, _ = tracker.initialise(frames[:5], INIT)
        for frame in frames[5:]:
            before = state.history
            state, record = tracker.step(state, frame)
            assert len(state.history) == small_config.history_length
            for kept, old in zip(state.history[:-1], before[1:]):
                np.testing.assert_array_equal(kept, old)
            accepted = extract_patch(frame, record.state, normalize=small_config.normalize)
            np.testing.assert_array_equal(state.history[-1], accepted)

    def test_step_before_warm_up_rejected(self, np_rng, small_config):
        """A short history is a state error."""
        tracker = AffineSubspaceTracker(small_config)
        state, _ = tracker.initialise([textured_frame(np_rng)] * 5, INIT)
        empty = type(state)(
            history=state.history[:2], particles=state.particles, bag=state.bag,
            frame_index=5, rng=state.rng,
        )
        with pytest.raises(InvalidStateError):
            tracker.step(empty, textured_frame(np_rng))

    def test_same_seed_same_records(self, short_sequence, small_config):
        """Two runs with one seed produce identical records."""
        init = BoxState.from_box(*_truth_box(short_sequence))
        a = run(short_sequence.frames, init, small_config)
        b = run(short_sequence.frames, init, small_config)
        assert a == b

    @pytest.mark.parametrize(
        "distance", [DistanceKind.AFFINE, DistanceKind.PROJECTION, DistanceKind.KL]
    )
    def test_follows_a_moving_object(self, short_sequence, small_config, distance):
        """Every distance kind keeps precision >= 0.9 on the noisy sequence."""
        config = small_config.with_overrides(distance=distance)
        init = BoxState.from_box(*_truth_box(short_sequence))
        records = run(short_sequence.frames, init, config)
        report = evaluate(records, short_sequence.truth)
        assert len(records) == len(short_sequence.frames)
        assert report.precision >= 0.9

    def test_linear_mode_runs(self, short_sequence, small_config):
        """The linear mode tracks with zero-origin models."""
        config = small_config.with_overrides(distance=DistanceKind.LINEAR)
        init = BoxState.from_box(*_truth_box(short_sequence))
        tracker = AffineSubspaceTracker(config)
        records = tracker.run(short_sequence.frames, init)
        assert len(records) == len(short_sequence.frames)
        assert all(np.all(m.origin == 0.0) for m in tracker.last_state.bag.all_models())

    def test_invalid_config_rejected(self):
        """Configuration is validated on construction."""
        with pytest.raises(InvalidInputError):
            AffineSubspaceTracker(TrackerConfig(history_length=3, subspace_dim=3))

    def test_small_frame_rejected(self, small_config):
        """A 1 x 1 frame is refused."""
        tiny = Frame(pixels=np.zeros((1, 1), dtype=np.uint8))
        with pytest.raises(InvalidInputError):
            AffineSubspaceTracker(small_config).run([tiny] * 6, BoxState.from_box(0, 0, 4, 4))


def _truth_box(sequence):
    first = sequence.truth[0]
    return first.x, first.y, first.w, first.h
