"""Small dense linear algebra and a reproducible random source.

Everything downstream (subspace fitting, principal angles, particle
diffusion) is built on three primitives:

- ``sym_eig``: cyclic Jacobi eigendecomposition of symmetric matrices,
  swept in round-robin rounds of disjoint pairs.
- ``thin_svd``: SVD of tall matrices.  Householder QR (numpy) reduces
  ``A`` to a k x k factor; the eigendecomposition of its Gram matrix and
  a one-sided Jacobi polish run on that factor only.  The tracker works
  with D = 1024 pixel rows and at most P + 1 columns, so a fit costs
  O(D k^2).
- ``RandomSource``: splitmix64 stream with Box-Muller Gaussians, fixed
  so that two runs with the same seed agree bit for bit on any platform.

Both decompositions accept stacked input of shape ``(..., m, k)``.  The
stacked path applies the same elementwise operations to every item, so
item ``i`` of a stacked call equals a call on item ``i`` alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from affine_tracker.errors import InvalidInputError

# Singular values below RANK_TOL * s_max are treated as zero.
RANK_TOL = 1e-10

_JACOBI_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 60
_SYMMETRY_TOL = 1e-12


# ---------------------------------------------------------------------------
# Symmetric eigendecomposition
# ---------------------------------------------------------------------------

def sym_eig(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix (or a stack of them).

    Args:
        matrix: Array of shape ``(..., k, k)``, symmetric within 1e-12
            relative to its largest entry.

    Returns:
        ``(Q, lam)`` with ``S @ Q == Q @ diag(lam)``, eigenvalues sorted
        descending and each eigenvector's largest-magnitude entry positive.

    Raises:
        InvalidInputError: Non-square, non-finite or asymmetric input.
    """
    s = np.array(matrix, dtype=np.float64, copy=True)
    if s.ndim < 2 or s.shape[-1] != s.shape[-2]:
        raise InvalidInputError(f"sym_eig needs square matrices, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise InvalidInputError("sym_eig input contains non-finite entries")

    k = s.shape[-1]
    lead = s.shape[:-2]
    if k == 0:
        return np.zeros(s.shape), np.zeros(lead + (0,))
    stack = s.reshape((-1, k, k))

    if stack.size:
        magnitude = np.maximum(np.abs(stack).max(axis=(1, 2)), 1.0)
        asym = np.abs(stack - np.swapaxes(stack, 1, 2)).max(axis=(1, 2))
        if np.any(asym > _SYMMETRY_TOL * magnitude):
            raise InvalidInputError(
                f"sym_eig input is not symmetric (max |S - S^T| = {asym.max():.3e})"
            )
        stack = 0.5 * (stack + np.swapaxes(stack, 1, 2))

    diag, vectors = _jacobi(stack)

    order = np.argsort(-diag, axis=-1, kind="stable")
    lam = np.take_along_axis(diag, order, axis=-1)
    vectors = np.take_along_axis(vectors, order[:, None, :], axis=-1)
    vectors = _normalize_signs(vectors)

    return vectors.reshape(lead + (k, k)), lam.reshape(lead + (k,))


def _jacobi(stack: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi sweeps over a ``(B, k, k)`` stack.

    Each sweep visits every pair once, in rounds of disjoint pairs that
    are rotated together.  A rotation is skipped for items whose pivot is
    already below the per-item threshold, which makes converged items
    exact fixed points.
    """
    s = stack.copy()
    batch, k, _ = s.shape
    eye = np.broadcast_to(np.eye(k), s.shape)
    vectors = eye.copy()
    if batch == 0 or k < 2:
        return np.diagonal(s, axis1=1, axis2=2).copy(), vectors

    scale = np.sqrt(np.sum(s * s, axis=(1, 2)))
    skip_below = (_JACOBI_TOL * scale / k)[:, None]
    upper_p, upper_q = np.triu_indices(k, 1)

    for _ in range(_JACOBI_MAX_SWEEPS):
        if not np.any(np.abs(s[:, upper_p, upper_q]) > skip_below):
            break
        for p, q in _rounds(k):
            apq = s[:, p, q]
            active = np.abs(apq) > skip_below
            if not active.any():
                continue
            rot = _rotations(eye, p, q, _angles(apq, s[:, q, q] - s[:, p, p], active))
            s = np.swapaxes(rot, 1, 2) @ s @ rot
            vectors = vectors @ rot

    return np.diagonal(s, axis1=1, axis2=2).copy(), vectors


@lru_cache(maxsize=None)
def _rounds(k: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Round-robin schedule: ``k - 1`` (or ``k``) rounds of disjoint pairs ``p < q``."""
    players = list(range(k + k % 2))
    rounds = []
    for _ in range(len(players) - 1):
        pairs = sorted(
            (min(a, b), max(a, b))
            for a, b in zip(players[: len(players) // 2], reversed(players))
            if max(a, b) < k
        )
        rounds.append((
            np.array([p for p, _ in pairs], dtype=np.intp),
            np.array([q for _, q in pairs], dtype=np.intp),
        ))
        players = [players[0], players[-1], *players[1:-1]]
    return tuple(rounds)


def _angles(off: np.ndarray, spread: np.ndarray, active: np.ndarray) -> np.ndarray:
    """Rotation angle zeroing ``off`` for a 2x2 block with ``a_qq - a_pp = spread``.

    ``tan(2 phi) = 2 off / spread`` with ``|phi| <= pi/4``; inactive
    entries get exactly 0.
    """
    direction = np.where(spread < 0.0, -1.0, 1.0)
    phi = 0.5 * np.arctan2(2.0 * off * direction, np.abs(spread))
    return np.where(active, phi, 0.0)


def _rotations(eye: np.ndarray, p: np.ndarray, q: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Stack of Givens products rotating columns ``(p[j], q[j])`` by ``phi[:, j]``."""
    c, sn = np.cos(phi), np.sin(phi)
    rot = eye.copy()
    rot[:, p, p] = c
    rot[:, q, q] = c
    rot[:, p, q] = sn
    rot[:, q, p] = -sn
    return rot


def _normalize_signs(columns: np.ndarray, *partners: np.ndarray) -> np.ndarray:
    """Flip columns so their largest-magnitude entry is positive.

    ``partners`` (same trailing column count) are flipped alongside, in
    place; only the primary array is returned.
    """
    if columns.shape[-1] == 0 or columns.shape[-2] == 0:
        return columns
    idx = np.argmax(np.abs(columns), axis=-2)
    pivots = np.take_along_axis(columns, idx[..., None, :], axis=-2)
    flip = np.where(pivots < 0.0, -1.0, 1.0)
    for partner in partners:
        partner *= flip
    return columns * flip


# ---------------------------------------------------------------------------
# Thin SVD
# ---------------------------------------------------------------------------

def thin_svd(
    matrix: np.ndarray,
    *,
    complete_basis: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``A = U diag(s) V^T`` of a tall matrix (or a stack).

    ``A`` is first reduced to ``Q R`` by Householder QR, so everything
    after that works on ``k x k`` matrices: the eigendecomposition of the
    Gram matrix ``R^T R = A^T A`` gives ``V``, and one-sided Jacobi
    rotations of ``R V`` refine it.  Left vectors ``Q (R v / s)`` are kept
    for every singular value above ``RANK_TOL * s_max``; the remaining
    singular values are reported as exactly zero.

    Args:
        matrix: Array of shape ``(..., m, k)`` with ``m >= k``.
        complete_basis: When True, left vectors of zero singular values
            are filled in so that ``U^T U = I``.  When False they are left
            as zero columns (callers that only use the leading rank skip
            the extra work).

    Returns:
        ``(U, s, V)`` of shapes ``(..., m, k)``, ``(..., k)``, ``(..., k, k)``.

    Raises:
        InvalidInputError: Non-finite input, or ``m < k``.
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim < 2:
        raise InvalidInputError(f"thin_svd needs a matrix, got shape {a.shape}")
    m, k = a.shape[-2], a.shape[-1]
    if m < k:
        raise InvalidInputError(f"thin_svd needs a tall matrix (m >= k), got {m}x{k}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("thin_svd input contains non-finite entries")
    lead = a.shape[:-2]
    if k == 0 or a.size == 0:
        return np.zeros(a.shape), np.zeros(lead + (k,)), np.zeros(lead + (k, k))

    q_factor, r = np.linalg.qr(a.reshape((-1, m, k)))
    gram = np.swapaxes(r, 1, 2) @ r
    v, _ = sym_eig(0.5 * (gram + np.swapaxes(gram, 1, 2)))

    # Squaring in R^T R only resolves singular values down to about
    # sqrt(eps) * s_max; a one-sided pass on R V recovers the small ones.
    b, v = _one_sided_jacobi(r @ v, v)
    s = np.sqrt(np.sum(b * b, axis=1))
    order = np.argsort(-s, axis=-1, kind="stable")
    s = np.take_along_axis(s, order, axis=-1)
    b = np.take_along_axis(b, order[:, None, :], axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)

    valid = s > RANK_TOL * s[:, :1]
    safe = np.where(valid, s, 1.0)
    small = _orthonormalize_valid(np.where(valid[:, None, :], b / safe[:, None, :], 0.0), valid)
    u = _normalize_signs(q_factor @ small, v)
    s = np.where(valid, s, 0.0)

    u = u.reshape(lead + (m, k))
    s = s.reshape(lead + (k,))
    v = v.reshape(lead + (k, k))
    valid = valid.reshape(lead + (k,))

    if complete_basis and not np.all(valid):
        flat_u = u.reshape((-1, m, k))
        flat_valid = valid.reshape((-1, k))
        for i in np.flatnonzero(~flat_valid.all(axis=1)):
            flat_u[i] = _complete_columns(flat_u[i], flat_valid[i])
        u = flat_u.reshape(u.shape)

    return u, s, v


def numerical_rank(
    singular_values: np.ndarray, reference: np.ndarray | float | None = None
) -> np.ndarray:
    """Count singular values above ``RANK_TOL * reference`` along the last axis.

    ``reference`` defaults to the largest singular value of each row.
    Works on one spectrum or a stack; a zero spectrum has rank 0.
    """
    s = np.asarray(singular_values, dtype=np.float64)
    if s.shape[-1] == 0:
        return np.zeros(s.shape[:-1], dtype=np.int64)
    ref = s.max(axis=-1) if reference is None else np.asarray(reference, dtype=np.float64)
    return np.count_nonzero(s > RANK_TOL * ref[..., None], axis=-1)


def _one_sided_jacobi(b: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotate column pairs of a ``(B, k, k)`` stack until they are orthogonal.

    ``v`` receives the same rotations, so ``B V^T`` is preserved.  Pairs
    already orthogonal to ``_JACOBI_TOL`` relative to their norms are
    left untouched.
    """
    batch, _, k = b.shape
    if batch == 0 or k < 2:
        return b, v
    eye = np.broadcast_to(np.eye(k), (batch, k, k))

    for _ in range(_JACOBI_MAX_SWEEPS):
        rotated = False
        for p, q in _rounds(k):
            bp, bq = b[:, :, p], b[:, :, q]
            alpha = np.sum(bp * bp, axis=1)
            beta = np.sum(bq * bq, axis=1)
            gamma = np.sum(bp * bq, axis=1)
            active = np.abs(gamma) > _JACOBI_TOL * np.sqrt(alpha * beta)
            if not active.any():
                continue
            rotated = True
            rot = _rotations(eye, p, q, _angles(gamma, beta - alpha, active))
            b = b @ rot
            v = v @ rot
        if not rotated:
            break
    return b, v


def _orthonormalize_valid(u: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Two passes of Gram-Schmidt over the valid columns of a ``(B, m, k)`` stack.

    Invalid columns stay zero and do not contribute projections.
    """
    u = u.copy()
    for j in range(u.shape[-1]):
        col = u[:, :, j]
        for _ in range(2):
            if j:
                prev = u[:, :, :j]
                col = col - np.einsum("bmi,bi->bm", prev, np.einsum("bmi,bm->bi", prev, col))
        norm = np.sqrt(np.sum(col * col, axis=1))
        keep = valid[:, j] & (norm > 0.0)
        u[:, :, j] = np.where(keep[:, None], col / np.where(keep, norm, 1.0)[:, None], 0.0)
    return u


def _complete_columns(u: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Replace the invalid columns of ``u`` with an orthonormal completion.

    Candidates are the standard basis vectors in order, projected off the
    columns accepted so far (twice, classical Gram-Schmidt).
    """
    m = u.shape[0]
    out = u.copy()
    accepted = [out[:, j] for j in range(out.shape[1]) if valid[j]]
    candidate = 0
    for j in range(out.shape[1]):
        if valid[j]:
            continue
        while candidate < m:
            e = np.zeros(m)
            e[candidate] = 1.0
            candidate += 1
            for _ in range(2):
                for col in accepted:
                    e -= (col @ e) * col
            norm = np.linalg.norm(e)
            if norm > 0.5:
                out[:, j] = e / norm
                accepted.append(out[:, j])
                break
    return out


# ---------------------------------------------------------------------------
# Random source
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 2.0 ** -53


@dataclass
class RandomSource:
    """splitmix64 stream; single owner, never drawn from concurrently.

    The state advances only through the draw methods.  ``uniforms`` and
    ``gaussians`` are the vectorized forms of ``next_uniform`` and
    ``next_gaussian`` and consume the stream in the same order.
    """

    state: int = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.state) <= _MASK64:
            raise InvalidInputError(f"seed must fit in 64 unsigned bits, got {self.state}")
        self.state = int(self.state)

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN_GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_uniform(self) -> float:
        """Uniform draw in (0, 1): the top 53 bits, zero mapped to 2^-53."""
        value = (self.next_u64() >> 11) * _INV_2_53
        return value if value > 0.0 else _INV_2_53

    def next_gaussian(self, mean: float = 0.0, std: float = 1.0) -> float:
        """Box-Muller draw; always consumes two uniforms, even for std = 0."""
        if std < 0.0:
            raise InvalidInputError(f"std must be >= 0, got {std}")
        u1 = self.next_uniform()
        u2 = self.next_uniform()
        z = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        return mean + std * z

    def uniforms(self, count: int) -> np.ndarray:
        """``count`` consecutive ``next_uniform`` values as an array."""
        if count < 0:
            raise InvalidInputError(f"count must be >= 0, got {count}")
        if count == 0:
            return np.zeros(0)
        steps = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(self.state) + steps * np.uint64(_GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
        self.state = (self.state + count * _GOLDEN_GAMMA) & _MASK64
        values = (z >> np.uint64(11)).astype(np.float64) * _INV_2_53
        return np.where(values > 0.0, values, _INV_2_53)

    def gaussians(self, count: int, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
        """``count`` Box-Muller draws (two uniforms each, in stream order)."""
        if std < 0.0:
            raise InvalidInputError(f"std must be >= 0, got {std}")
        u = self.uniforms(2 * count).reshape((count, 2))
        z = np.sqrt(-2.0 * np.log(u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])
        return mean + std * z

    def spawn_copy(self) -> "RandomSource":
        """Independent copy at the current position (for replaying a stream)."""
        return RandomSource(state=self.state)
