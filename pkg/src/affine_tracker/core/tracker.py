"""The affine subspace tracking loop.

Each frame:

1. resample the particles by weight and diffuse them;
2. cut one patch per particle and fit one candidate subspace per
   particle from the accepted history plus that patch;
3. score every candidate against every bag model, normalize per model
   and sum over models;
4. take the best particle as the estimate, reweight all particles by the
   summed likelihoods, push the accepted patch into the history and
   offer the accepted candidate subspace to the bag.

The first ``P`` frames are warm-up: the state is held at the initial box
and the collected patches seed the bag.

All randomness is consumed in step 1; steps 2-4 are pure array work over
the whole particle set at once.
"""

from __future__ import annotations

import dataclasses
import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from affine_tracker.core.appearance import (
    build_affine_subspace,
    extract_patch,
    extract_patches,
    fit_affine_subspaces,
    states_to_boxes,
)
from affine_tracker.core.bag import ModelBag
from affine_tracker.core.grassmann import AffineSubspace, batch_distances, subspace_distance
from affine_tracker.core.models import (
    BoxState,
    DistanceKind,
    Frame,
    Particle,
    TrackerConfig,
    TrackRecord,
)
from affine_tracker.core.motion import diffuse, init_particles, resample
from affine_tracker.core.numerics import RandomSource
from affine_tracker.errors import InvalidInputError, InvalidStateError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TrackState:
    """Everything the loop carries from one frame to the next.

    Attributes:
        history: The last ``P`` accepted patches, oldest first.
        particles: Current particle set with its weights.
        bag: Appearance models.
        frame_index: 1-based index of the last processed frame.
        rng: Random stream positioned after the last processed frame.
    """

    history: tuple[np.ndarray, ...]
    particles: tuple[Particle, ...]
    bag: ModelBag
    frame_index: int
    rng: RandomSource


# ---------------------------------------------------------------------------
# Decision making
# ---------------------------------------------------------------------------

def candidate_subspace(
    history: Sequence[np.ndarray],
    candidate_patch: np.ndarray,
    n: int,
    *,
    centered: bool = True,
) -> AffineSubspace:
    """Subspace of the accepted history (oldest first) plus one candidate patch."""
    if len(history) == 0:
        raise InvalidInputError("candidate subspace needs a non-empty history")
    return build_affine_subspace([*history, candidate_patch], n, centered=centered)


def likelihoods_from_distances(distances: np.ndarray, sigma: float) -> np.ndarray:
    """``exp(-d / sigma)`` normalized over candidates.

    The minimum finite distance is subtracted first; infinite distances
    get probability 0, and a set with no finite distance is uniform.
    """
    if not sigma > 0.0:
        raise InvalidInputError(f"sigma must be > 0, got {sigma}")
    d = np.asarray(distances, dtype=np.float64)
    if d.size == 0:
        raise InvalidInputError("likelihoods need at least one candidate")
    finite = np.isfinite(d)
    if not finite.any():
        return np.full(d.shape, 1.0 / d.size)
    shifted = np.where(finite, d - d[finite].min(), np.inf)
    p = np.exp(-shifted / sigma)
    return p / p.sum()


def likelihoods(
    candidates: Sequence[AffineSubspace],
    model: AffineSubspace,
    alpha: float,
    sigma: float,
    *,
    kind: DistanceKind = DistanceKind.AFFINE,
    kl_sigma2: float = 1.0,
) -> np.ndarray:
    """Normalized likelihood of each candidate under one bag model."""
    distances = np.array(
        [subspace_distance(c, model, kind, alpha, kl_sigma2) for c in candidates]
    )
    return likelihoods_from_distances(distances, sigma)


def aggregate(per_model: Sequence[np.ndarray]) -> np.ndarray:
    """Sum rule over the bag: elementwise sum of per-model likelihoods."""
    if len(per_model) == 0:
        raise InvalidStateError("no models to aggregate; the bag has not been seeded")
    lengths = {len(v) for v in per_model}
    if len(lengths) != 1:
        raise InvalidInputError(f"likelihood vectors differ in length: {sorted(lengths)}")
    return np.sum(np.asarray(per_model, dtype=np.float64), axis=0)


def estimate(
    aggregated: np.ndarray,
    particles: Sequence[Particle],
    frame_index: int = 0,
) -> tuple[int, TrackRecord]:
    """Particle with the largest aggregated likelihood (lowest index on ties)."""
    if len(aggregated) != len(particles) or len(particles) == 0:
        raise InvalidInputError(
            f"{len(aggregated)} likelihoods for {len(particles)} particles"
        )
    index = int(np.argmax(aggregated))
    record = TrackRecord(
        frame_index=frame_index,
        state=particles[index].state,
        score=float(aggregated[index]),
    )
    return index, record


# ---------------------------------------------------------------------------
# Tracker
# ---------------------------------------------------------------------------

class AffineSubspaceTracker:
    """Runs the tracking loop for one configuration.

    ``initialise`` handles the warm-up frames, ``step`` advances one frame
    and ``run`` does both over a whole sequence.  ``step`` never mutates
    its input state, so a state can be replayed.
    """

    def __init__(self, config: TrackerConfig | None = None) -> None:
        self.config = config or TrackerConfig()
        self.config.validate()
        self.last_state: TrackState | None = None

    @property
    def _centered(self) -> bool:
        return self.config.distance is not DistanceKind.LINEAR

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------

    def initialise(
        self, frames: Sequence[Frame], init: BoxState
    ) -> tuple[TrackState, list[TrackRecord]]:
        """Warm-up over exactly ``P`` frames: hold ``init`` and seed the bag."""
        cfg = self.config
        if len(frames) != cfg.history_length:
            raise InvalidInputError(
                f"warm-up needs {cfg.history_length} frames, got {len(frames)}"
            )
        history = tuple(extract_patch(f, init, normalize=cfg.normalize) for f in frames)
        records = [TrackRecord(frame_index=i + 1, state=init) for i in range(len(frames))]

        model = build_affine_subspace(history, cfg.subspace_dim, centered=self._centered)
        if model.rank == 0:
            logger.warning("Warm-up patches carry no variation; bootstrap model has rank 0")
        bag = ModelBag(capacity=cfg.bag_size, update_period=cfg.update_period)
        bag = bag.maybe_update(model, frame_index=cfg.history_length)

        state = TrackState(
            history=history,
            particles=tuple(init_particles(init, cfg.motion)),
            bag=bag,
            frame_index=cfg.history_length,
            rng=RandomSource(cfg.seed),
        )
        return state, records

    def step(self, state: TrackState, frame: Frame) -> tuple[TrackState, TrackRecord]:
        """Process the frame after ``state.frame_index``."""
        cfg = self.config
        if len(state.history) != cfg.history_length or not state.bag.models:
            raise InvalidStateError("step called before warm-up completed")
        frame_index = state.frame_index + 1

        rng = state.rng.spawn_copy()
        particles = resample(state.particles, rng)
        particles = diffuse(particles, cfg.motion, rng, (frame.width, frame.height))

        patches = extract_patches(
            frame, *states_to_boxes([p.state for p in particles]), normalize=cfg.normalize
        )
        origins, bases, ranks = fit_affine_subspaces(
            self._candidate_stacks(state.history, patches),
            cfg.subspace_dim,
            centered=self._centered,
        )

        per_model = [
            likelihoods_from_distances(
                batch_distances(
                    cfg.distance, origins, bases, ranks, model, cfg.alpha, cfg.kl_sigma2
                ),
                cfg.sigma,
            )
            for model in state.bag.all_models()
        ]
        combined = aggregate(per_model)
        index, record = estimate(combined, particles, frame_index)

        weights = combined / combined.sum()
        particles = [Particle(state=p.state, weight=float(w)) for p, w in zip(particles, weights)]

        accepted = AffineSubspace.from_arrays(origins[index], bases[index, :, : ranks[index]])
        new_state = dataclasses.replace(
            state,
            history=state.history[1:] + (patches[index],),
            particles=tuple(particles),
            bag=state.bag.maybe_update(accepted, frame_index),
            frame_index=frame_index,
            rng=rng,
        )
        logger.debug(
            "Frame %d: x=%.2f y=%.2f s=%.4f score=%.6f",
            frame_index, record.state.x, record.state.y, record.state.s, record.score,
        )
        return new_state, record

    def run(self, frames: Sequence[Frame], init: BoxState) -> list[TrackRecord]:
        """Track ``init`` through ``frames``; one record per frame.

        Raises:
            InvalidInputError: Fewer than ``P`` frames.
        """
        cfg = self.config
        if len(frames) < cfg.history_length:
            raise InvalidInputError(
                f"tracking needs at least {cfg.history_length} frames, got {len(frames)}"
            )
        logger.info(
            "Tracking %d frames: P=%d n=%d k=%d W=%d particles=%d distance=%s seed=%d",
            len(frames), cfg.history_length, cfg.subspace_dim, cfg.bag_size,
            cfg.update_period, cfg.motion.n_particles, cfg.distance.value, cfg.seed,
        )
        state, records = self.initialise(frames[: cfg.history_length], init)
        for frame in frames[cfg.history_length:]:
            state, record = self.step(state, frame)
            records.append(record)
        self.last_state = state
        logger.info("Tracking finished: %d records, %d bag models", len(records), len(state.bag))
        return records

    # ------------------------------------------------------------------
    # Internal helpers
    # ------------------------------------------------------------------

    @staticmethod
    def _candidate_stacks(history: Sequence[np.ndarray], patches: np.ndarray) -> np.ndarray:
        """``(N, D, P + 1)`` image sets: shared history columns, then each patch."""
        past = np.stack(history, axis=1)
        shared = np.broadcast_to(past, (patches.shape[0],) + past.shape)
        return np.concatenate([shared, patches[:, :, None]], axis=2)


def run(frames: Sequence[Frame], init: BoxState, config: TrackerConfig) -> list[TrackRecord]:
    """Functional form of ``AffineSubspaceTracker(config).run``."""
    return AffineSubspaceTracker(config).run(frames, init)
