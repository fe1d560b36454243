"""Tests for the FIFO model bag."""

import pytest

from affine_tracker.core.bag import ModelBag
from affine_tracker.errors import InvalidInputError
from tests.conftest import random_affine


@pytest.fixture
def models(np_rng):
    """Eight random rank-2 models in R^12."""
    return [random_affine(np_rng, 12, 2) for _ in range(8)]


class TestModelBag:
    """Bounded FIFO of appearance models, updated every K frames."""

    def test_first_model_always_accepted(self, models):
        """An empty bag takes its first model at any frame."""
        bag = ModelBag(capacity=3, update_period=5).maybe_update(models[0], frame_index=1)
        assert len(bag) == 1
        assert bag.last_update_frame == 1
        assert bag.ambient_dim == 12

    def test_update_only_every_period(self, models):
        """Offers before K frames have passed return the same bag."""
        bag = ModelBag(capacity=10, update_period=5).maybe_update(models[0], 5)
        for frame in range(6, 10):
            same = bag.maybe_update(models[1], frame)
            assert same is bag
        bag = bag.maybe_update(models[1], 10)
        assert len(bag) == 2
        assert bag.frames_since_update(12) == 2

    def test_oldest_model_evicted(self, models):
        """A full bag drops its oldest model."""
        bag = ModelBag(capacity=3, update_period=1)
        for frame, model in enumerate(models[:5], start=1):
            bag = bag.maybe_update(model, frame)
        assert len(bag) == 3
        assert bag.all_models() == tuple(models[2:5])

    def test_size_over_a_run(self, models):
        """Seeded at frame 5 with K = 5, the bag fills to ten and stays there."""
        # Seeded at frame 5, offered a model every frame up to 60.
        bag = ModelBag(capacity=10, update_period=5)
        sizes = {}
        for frame in range(5, 61):
            bag = bag.maybe_update(models[frame % len(models)], frame)
            sizes[frame] = len(bag)
        assert sizes[5] == 1
        assert sizes[9] == 1
        assert sizes[10] == 2
        assert sizes[50] == 10
        assert sizes[60] == 10

    def test_update_does_not_mutate(self, models):
        """maybe_update returns a new bag and leaves the old one alone."""
        bag = ModelBag(capacity=2, update_period=1).maybe_update(models[0], 1)
        bag.maybe_update(models[1], 2)
        assert len(bag) == 1

    def test_dimension_mismatch_rejected(self, models, np_rng):
        """Models of another ambient dimension are refused."""
        bag = ModelBag().maybe_update(models[0], 1)
        with pytest.raises(InvalidInputError):
            bag.maybe_update(random_affine(np_rng, 13, 2), 10)

    @pytest.mark.parametrize("kwargs", [{"capacity": 0}, {"update_period": 0}])
    def test_invalid_parameters_rejected(self, kwargs):
        """Capacity and period must be at least one."""
        with pytest.raises(InvalidInputError):
            ModelBag(**kwargs)

    def test_empty_bag(self):
        """An empty bag has no dimension, no last update and is always due."""
        bag = ModelBag()
        assert len(bag) == 0
        assert bag.ambient_dim is None
        assert bag.frames_since_update(3) is None
        assert bag.is_due(3)
        assert bag.all_models() == ()
