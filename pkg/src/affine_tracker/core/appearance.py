"""Patch extraction and affine subspace fitting.

A candidate region of ``round(base * s)`` pixels anchored at
``(round(x), round(y))`` is bilinearly resampled to ``PATCH_SHAPE``.
Output sample ``j`` maps to the source coordinate
``x0 + (j + 0.5) * w / 32 - 0.5`` (half-pixel centers); coordinates
outside the frame clamp to the nearest edge pixel.

Image sets are stored column-wise, ``(D, m)``; a stack of sets for all
particles is ``(N, D, m)`` and is fitted in one batched call.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from affine_tracker.core.grassmann import AffineSubspace
from affine_tracker.core.models import PATCH_SHAPE, BoxState, Frame, round_half_up
from affine_tracker.core.numerics import numerical_rank, thin_svd
from affine_tracker.errors import InvalidInputError


# ---------------------------------------------------------------------------
# Patch extraction
# ---------------------------------------------------------------------------

def extract_patch(frame: Frame, state: BoxState, *, normalize: bool = True) -> np.ndarray:
    """Feature vector (length ``PATCH_DIM``) of the region covered by ``state``."""
    return extract_patches(
        frame,
        np.array([round_half_up(state.x)]),
        np.array([round_half_up(state.y)]),
        np.array([state.width]),
        np.array([state.height]),
        normalize=normalize,
    )[0]


def extract_patches(
    frame: Frame,
    x0: np.ndarray,
    y0: np.ndarray,
    widths: np.ndarray,
    heights: np.ndarray,
    *,
    normalize: bool = True,
) -> np.ndarray:
    """Patches for many integer boxes at once.

    Args:
        frame: Source image.
        x0, y0: Integer top-left corners, shape ``(N,)``.
        widths, heights: Integer box sizes, shape ``(N,)``.
        normalize: Divide pixel values by 255.

    Returns:
        Array of shape ``(N, PATCH_DIM)``, rows in row-major patch order.

    Raises:
        InvalidInputError: Frame smaller than 2x2.
    """
    if frame.width < 2 or frame.height < 2:
        raise InvalidInputError(
            f"frame must be at least 2x2 pixels, got {frame.width}x{frame.height}"
        )
    rows, cols = PATCH_SHAPE
    x0 = np.asarray(x0, dtype=np.float64)[:, None]
    y0 = np.asarray(y0, dtype=np.float64)[:, None]
    widths = np.asarray(widths, dtype=np.float64)[:, None]
    heights = np.asarray(heights, dtype=np.float64)[:, None]

    xs = np.clip(x0 + (np.arange(cols) + 0.5) * widths / cols - 0.5, 0.0, frame.width - 1)
    ys = np.clip(y0 + (np.arange(rows) + 0.5) * heights / rows - 0.5, 0.0, frame.height - 1)

    x_lo = np.floor(xs).astype(np.intp)
    y_lo = np.floor(ys).astype(np.intp)
    x_hi = np.minimum(x_lo + 1, frame.width - 1)
    y_hi = np.minimum(y_lo + 1, frame.height - 1)
    fx = (xs - x_lo)[:, None, :]
    fy = (ys - y_lo)[:, :, None]

    image = frame.pixels.astype(np.float64)
    top_left = image[y_lo[:, :, None], x_lo[:, None, :]]
    top_right = image[y_lo[:, :, None], x_hi[:, None, :]]
    bottom_left = image[y_hi[:, :, None], x_lo[:, None, :]]
    bottom_right = image[y_hi[:, :, None], x_hi[:, None, :]]

    top = top_left + fx * (top_right - top_left)
    bottom = bottom_left + fx * (bottom_right - bottom_left)
    patches = (top + fy * (bottom - top)).reshape((len(xs), rows * cols))
    if normalize:
        patches /= 255.0
    return patches


def states_to_boxes(states: Sequence[BoxState]) -> tuple[np.ndarray, ...]:
    """Integer ``(x0, y0, w, h)`` arrays for a sequence of states."""
    x0 = np.array([round_half_up(s.x) for s in states], dtype=np.int64)
    y0 = np.array([round_half_up(s.y) for s in states], dtype=np.int64)
    w = np.array([s.width for s in states], dtype=np.int64)
    h = np.array([s.height for s in states], dtype=np.int64)
    return x0, y0, w, h


# ---------------------------------------------------------------------------
# Subspace fitting
# ---------------------------------------------------------------------------

def build_affine_subspace(
    patches: Sequence[np.ndarray],
    n: int,
    *,
    centered: bool = True,
) -> AffineSubspace:
    """Fit an affine subspace to an image set.

    The origin is the elementwise mean and the basis the leading
    ``min(n, rank)`` left-singular vectors of the centered ``D x m`` matrix.
    With ``centered=False`` the origin is 0 and the raw matrix is used
    (the linear-subspace model).

    Raises:
        InvalidInputError: Empty set, ``n < 1`` or mixed dimensions.
    """
    if len(patches) == 0:
        raise InvalidInputError("cannot fit a subspace to an empty image set")
    try:
        stack = np.stack([np.asarray(p, dtype=np.float64) for p in patches], axis=1)
    except ValueError as exc:
        raise InvalidInputError(f"patches must share one dimension: {exc}") from exc
    if stack.ndim != 2:
        raise InvalidInputError(f"patches must be vectors, got stack shape {stack.shape}")
    origins, bases, ranks = fit_affine_subspaces(stack[None], n, centered=centered)
    return AffineSubspace.from_arrays(origins[0], bases[0, :, : ranks[0]])


def fit_affine_subspaces(
    stacks: np.ndarray,
    n: int,
    *,
    centered: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched subspace fit over ``(B, D, m)`` image sets.

    Returns:
        ``(origins, bases, ranks)`` of shapes ``(B, D)``, ``(B, D, n)`` and
        ``(B,)``.  Columns of ``bases[i]`` past ``ranks[i]`` are zero.
    """
    if n < 1:
        raise InvalidInputError(f"subspace dimension must be >= 1, got {n}")
    data = np.asarray(stacks, dtype=np.float64)
    if data.ndim != 3 or data.shape[2] < 1:
        raise InvalidInputError(f"expected a (B, D, m) stack with m >= 1, got {data.shape}")
    if not np.all(np.isfinite(data)):
        raise InvalidInputError("image set contains non-finite values")
    batch, dim, m = data.shape

    if centered:
        origins = data.mean(axis=2)
        matrix = data - origins[:, :, None]
        rank_cap = min(n, m - 1, dim)
    else:
        origins = np.zeros((batch, dim))
        matrix = data
        rank_cap = min(n, m, dim)

    bases = np.zeros((batch, dim, n))
    ranks = np.zeros(batch, dtype=np.int64)
    if rank_cap < 1:
        return origins, bases, ranks

    # The QR reduction needs a tall matrix: m <= D.
    if m > dim:
        raise InvalidInputError(f"image set has more images ({m}) than dimensions ({dim})")
    u, s, _ = thin_svd(matrix, complete_basis=False)

    # Singular values are compared with the scale of the raw data so that
    # rounding residue of an exactly constant set does not count as rank.
    scale = np.maximum(s[:, 0], np.sqrt(np.sum(data * data, axis=(1, 2))))
    ranks = np.minimum(numerical_rank(s, scale), rank_cap)

    leading = u[:, :, :rank_cap]
    keep = np.arange(rank_cap)[None, :] < ranks[:, None]
    leading = np.where(keep[:, None, :], leading, 0.0)
    bases[:, :, :rank_cap] = leading
    return origins, bases, ranks
