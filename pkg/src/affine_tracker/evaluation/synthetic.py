"""Seeded synthetic sequences with known ground truth.

A textured block moves over a static textured background.  Optional
effects: a global illumination gain ``1 + a * sin(2 pi t / length)``,
additive Gaussian noise, and a gray occluder over the lower half of the
object for ten frames in the middle of the sequence.

Random draws, all from one ``RandomSource(seed)`` in this order:
object texture (row-major, 0..255), background texture (row-major,
60..190), then per frame the noise field (row-major) when
``noise_std > 0``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from affine_tracker.core.models import Frame, GroundTruthBox, round_half_up
from affine_tracker.core.numerics import RandomSource
from affine_tracker.errors import InvalidInputError
from affine_tracker.io.pgm import write_pgm
from affine_tracker.io.records import save_ground_truth

logger = logging.getLogger(__name__)

TRAJECTORIES = ("linear", "sinusoidal")
OCCLUDER_LEVEL = 128
OCCLUDED_FRAMES = 10


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of one generated sequence."""

    length: int = 120
    frame_w: int = 320
    frame_h: int = 240
    object_w: int = 40
    object_h: int = 40
    trajectory: str = "linear"
    start_x: float = 40.0
    start_y: float = 100.0
    velocity_x: float = 1.0
    velocity_y: float = 0.25
    amplitude: float = 30.0
    illumination: float = 0.0
    occluder: bool = False
    noise_std: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.length < 1:
            raise InvalidInputError(f"length must be >= 1, got {self.length}")
        if self.frame_w < 2 or self.frame_h < 2:
            raise InvalidInputError(
                f"frame must be at least 2x2, got {self.frame_w}x{self.frame_h}"
            )
        if self.object_w < 2 or self.object_h < 2:
            raise InvalidInputError(
                f"object must be at least 2x2, got {self.object_w}x{self.object_h}"
            )
        if self.trajectory not in TRAJECTORIES:
            raise InvalidInputError(
                f"trajectory must be one of {', '.join(TRAJECTORIES)}, got {self.trajectory!r}"
            )
        if self.noise_std < 0.0:
            raise InvalidInputError(f"noise_std must be >= 0, got {self.noise_std}")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidInputError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    @property
    def occluded_range(self) -> range:
        """1-based frames covered by the occluder (empty when disabled)."""
        if not self.occluder:
            return range(0)
        first = self.length // 2 - OCCLUDED_FRAMES // 2 + 1
        return range(first, first + OCCLUDED_FRAMES)


@dataclass(frozen=True)
class SyntheticSequence:
    frames: tuple[Frame, ...]
    truth: tuple[GroundTruthBox, ...]


def trajectory(spec: SyntheticSpec) -> list[tuple[int, int]]:
    """Integer top-left corner of the object for frames ``1..length``.

    Raises:
        InvalidInputError: The object leaves the frame at some point.
    """
    spec.validate()
    positions: list[tuple[int, int]] = []
    for t in range(1, spec.length + 1):
        x = spec.start_x + spec.velocity_x * (t - 1)
        if spec.trajectory == "linear":
            y = spec.start_y + spec.velocity_y * (t - 1)
        else:
            y = spec.start_y + spec.amplitude * math.sin(2.0 * math.pi * (t - 1) / spec.length)
        xi, yi = round_half_up(x), round_half_up(y)
        inside_x = 0 <= xi and xi + spec.object_w <= spec.frame_w
        inside_y = 0 <= yi and yi + spec.object_h <= spec.frame_h
        if not (inside_x and inside_y):
            raise InvalidInputError(
                f"object at ({xi}, {yi}) leaves the {spec.frame_w}x{spec.frame_h} frame "
                f"at frame {t}"
            )
        positions.append((xi, yi))
    return positions


def render_sequence(spec: SyntheticSpec) -> SyntheticSequence:
    """Generate frames and ground truth in memory."""
    positions = trajectory(spec)
    rng = RandomSource(spec.seed)
    texture = np.floor(rng.uniforms(spec.object_w * spec.object_h) * 256.0)
    texture = texture.reshape((spec.object_h, spec.object_w))
    background = 60.0 + np.floor(rng.uniforms(spec.frame_w * spec.frame_h) * 131.0)
    background = background.reshape((spec.frame_h, spec.frame_w))
    occluded = spec.occluded_range

    frames: list[Frame] = []
    truth: list[GroundTruthBox] = []
    for t, (x, y) in enumerate(positions, start=1):
        image = background.copy()
        image[y: y + spec.object_h, x: x + spec.object_w] = texture
        if t in occluded:
            top = y + spec.object_h // 2
            image[top: y + spec.object_h, x: x + spec.object_w] = OCCLUDER_LEVEL
        if spec.illumination:
            image *= 1.0 + spec.illumination * math.sin(2.0 * math.pi * t / spec.length)
        if spec.noise_std > 0.0:
            image += rng.gaussians(image.size, 0.0, spec.noise_std).reshape(image.shape)
        pixels = np.clip(np.floor(image + 0.5), 0, 255).astype(np.uint8)
        frames.append(Frame(pixels=pixels, index=t, name=f"frame_{t:04d}.pgm"))
        truth.append(GroundTruthBox(x=x, y=y, w=spec.object_w, h=spec.object_h))
    return SyntheticSequence(frames=tuple(frames), truth=tuple(truth))


def generate_synthetic(spec: SyntheticSpec, out_dir: str | Path) -> SyntheticSequence:
    """Render a sequence and write ``frame_NNNN.pgm`` files plus ``groundtruth.txt``."""
    sequence = render_sequence(spec)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for frame in sequence.frames:
        write_pgm(out_dir / frame.name, frame.pixels)
    save_ground_truth(out_dir / "groundtruth.txt", sequence.truth)
    logger.info(
        "Wrote %d synthetic frames (%s, seed %d) to %s",
        spec.length, spec.trajectory, spec.seed, out_dir,
    )
    return sequence
