"""Bag of appearance models with oldest-out replacement."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass

from affine_tracker.core.grassmann import AffineSubspace
from affine_tracker.errors import InvalidInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelBag:
    """FIFO memory of at most ``capacity`` models, oldest first.

    A new model is accepted when the bag is empty or at least
    ``update_period`` frames have passed since the last insertion.
    ``maybe_update`` returns a new bag, or ``self`` when nothing is due.
    """

    capacity: int = 10
    update_period: int = 5
    models: tuple[AffineSubspace, ...] = ()
    last_update_frame: int | None = None

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise InvalidInputError(f"bag capacity must be >= 1, got {self.capacity}")
        if self.update_period < 1:
            raise InvalidInputError(f"update period must be >= 1, got {self.update_period}")
        if len(self.models) > self.capacity:
            raise InvalidInputError(
                f"bag holds {len(self.models)} models, capacity is {self.capacity}"
            )

    def __len__(self) -> int:
        return len(self.models)

    @property
    def ambient_dim(self) -> int | None:
        return self.models[0].ambient_dim if self.models else None

    def all_models(self) -> tuple[AffineSubspace, ...]:
        return self.models

    def frames_since_update(self, frame_index: int) -> int | None:
        """Frames elapsed since the last insertion (``None`` before the first)."""
        if self.last_update_frame is None:
            return None
        return frame_index - self.last_update_frame

    def is_due(self, frame_index: int) -> bool:
        elapsed = self.frames_since_update(frame_index)
        return elapsed is None or not self.models or elapsed >= self.update_period

    def maybe_update(self, new_model: AffineSubspace, frame_index: int) -> "ModelBag":
        dim = self.ambient_dim
        if dim is not None and new_model.ambient_dim != dim:
            raise InvalidInputError(
                f"model dimension {new_model.ambient_dim} does not match bag dimension {dim}"
            )
        if not self.is_due(frame_index):
            return self

        models = self.models
        if len(models) >= self.capacity:
            models = models[len(models) - self.capacity + 1:]
        logger.debug(
            "Bag update at frame %d: rank-%d model, %d -> %d models",
            frame_index, new_model.rank, len(self.models), len(models) + 1,
        )
        return dataclasses.replace(
            self, models=models + (new_model,), last_update_frame=frame_index
        )
