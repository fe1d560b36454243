"""Condensation particle filter over ``(x, y, s)``.

Particles are resampled with replacement in proportion to their weights
and then diffused with independent Gaussian steps.  All randomness comes
from the caller's ``RandomSource``:

- ``resample`` draws one uniform per output particle;
- ``diffuse`` draws three Gaussians per particle, in particle order and
  ``x, y, s`` order within a particle.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from affine_tracker.core.models import BoxState, MotionParams, Particle, round_half_up
from affine_tracker.core.numerics import RandomSource
from affine_tracker.errors import DegenerateWeightsError, InvalidInputError


def init_particles(seed_state: BoxState, params: MotionParams) -> list[Particle]:
    """``n_particles`` copies of ``seed_state`` with uniform weights."""
    params.validate()
    weight = 1.0 / params.n_particles
    return [Particle(state=seed_state, weight=weight) for _ in range(params.n_particles)]


def normalized_weights(particles: Sequence[Particle]) -> np.ndarray:
    """Particle weights scaled to sum to 1.

    Raises:
        DegenerateWeightsError: Negative or non-finite weights, or a zero sum.
    """
    weights = np.array([p.weight for p in particles], dtype=np.float64)
    if weights.size == 0:
        raise DegenerateWeightsError("cannot normalize an empty particle set")
    if not np.all(np.isfinite(weights)) or np.any(weights < 0.0):
        raise DegenerateWeightsError("particle weights must be finite and >= 0")
    total = weights.sum()
    if not total > 0.0 or not np.isfinite(total):
        raise DegenerateWeightsError(f"particle weights sum to {total}")
    return weights / total


def resample_indices(weights: np.ndarray, rng: RandomSource) -> np.ndarray:
    """Multinomial draw of ``len(weights)`` indices by inverse-CDF lookup.

    ``weights`` must already be normalized.  Index ``i`` is chosen when
    ``cdf[i-1] <= u < cdf[i]``, so zero-weight entries are never picked.
    """
    cdf = np.cumsum(weights)
    draws = rng.uniforms(len(weights))
    indices = np.searchsorted(cdf, draws, side="right")
    # u can land past cdf[-1] when rounding leaves the total just below 1.
    last = int(np.flatnonzero(weights > 0.0)[-1])
    return np.minimum(indices, last)


def resample(particles: Sequence[Particle], rng: RandomSource) -> list[Particle]:
    """Draw ``N`` particles with replacement; output weights are ``1/N``."""
    weights = normalized_weights(particles)
    uniform = 1.0 / len(particles)
    return [
        Particle(state=particles[i].state, weight=uniform)
        for i in resample_indices(weights, rng)
    ]


def diffuse(
    particles: Sequence[Particle],
    params: MotionParams,
    rng: RandomSource,
    frame_size: tuple[int, int] | None = None,
) -> list[Particle]:
    """Brownian step on every particle.

    ``s`` is clamped to ``[s_min, s_max]``.  When ``frame_size = (W, H)``
    is given, ``x`` and ``y`` are clamped so the scaled box keeps at least
    one pixel inside the frame.  Weights are carried over unchanged.
    """
    if not particles:
        return []
    count = len(particles)
    noise = rng.gaussians(3 * count).reshape((count, 3))
    steps = noise * np.array([params.std_x, params.std_y, params.std_s])

    out: list[Particle] = []
    for particle, (dx, dy, ds) in zip(particles, steps):
        state = particle.state
        s = min(max(state.s + float(ds), params.s_min), params.s_max)
        x = state.x + float(dx)
        y = state.y + float(dy)
        if frame_size is not None:
            x, y = _keep_overlap(x, y, s, state, frame_size)
        out.append(Particle(state=state.moved(x, y, s), weight=particle.weight))
    return out


def _keep_overlap(
    x: float, y: float, s: float, state: BoxState, frame_size: tuple[int, int]
) -> tuple[float, float]:
    width, height = frame_size
    if width < 1 or height < 1:
        raise InvalidInputError(f"frame size must be positive, got {frame_size}")
    box_w = round_half_up(state.base_w * s)
    box_h = round_half_up(state.base_h * s)
    x = min(max(x, 1.0 - box_w), width - 1.0)
    y = min(max(y, 1.0 - box_h), height - 1.0)
    return x, y
