"""Distances between linear and affine subspaces.

A linear subspace is a point on the Grassmann manifold, represented by an
orthonormal ``D x r`` basis.  An affine subspace adds an origin ``mu``:
``{z : z = mu + U y}``.

Distances:

- principal angles, from the cross product ``X^T Y`` of two bases;
- geodesic distance ``||theta||_2`` and projection distance ``||sin theta||_2``;
- the affine distance ``geodesic(U_A, U_B) + alpha * d^T M d`` with
  ``d = mu_A - mu_B`` and ``M = 2I - U_A U_A^T - U_B U_B^T``;
- the symmetric KL distance between ``N(mu_i, sigma^2 I + U_i U_i^T)``.

Quadratic forms are evaluated through ``||U^T d||`` and never build the
``D x D`` matrix ``M``.  Every per-pair function is a thin wrapper over a
stacked kernel, which the tracker calls directly for a whole particle set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from affine_tracker.core.models import DistanceKind
from affine_tracker.core.numerics import sym_eig
from affine_tracker.errors import InvalidInputError

_ORTHONORMAL_TOL = 1e-8


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LinearSubspace:
    """Orthonormal ``D x r`` basis (``r`` may be 0)."""

    basis: np.ndarray

    def __post_init__(self) -> None:
        basis = np.asarray(self.basis, dtype=np.float64)
        if basis.ndim != 2:
            raise InvalidInputError(f"basis must be a D x r matrix, got shape {basis.shape}")
        if basis.shape[1] > basis.shape[0]:
            raise InvalidInputError(
                f"basis rank {basis.shape[1]} exceeds dimension {basis.shape[0]}"
            )
        if not np.all(np.isfinite(basis)):
            raise InvalidInputError("basis contains non-finite entries")
        gram = basis.T @ basis
        if gram.size and np.abs(gram - np.eye(basis.shape[1])).max() > _ORTHONORMAL_TOL:
            raise InvalidInputError("basis columns are not orthonormal")
        object.__setattr__(self, "basis", basis)

    @property
    def ambient_dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def rank(self) -> int:
        return int(self.basis.shape[1])


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    """Origin ``mu`` plus a linear subspace through it."""

    origin: np.ndarray
    subspace: LinearSubspace

    def __post_init__(self) -> None:
        origin = np.asarray(self.origin, dtype=np.float64)
        if origin.ndim != 1:
            raise InvalidInputError(f"origin must be a vector, got shape {origin.shape}")
        if not np.all(np.isfinite(origin)):
            raise InvalidInputError("origin contains non-finite entries")
        if origin.shape[0] != self.subspace.ambient_dim:
            raise InvalidInputError(
                f"origin has dimension {origin.shape[0]}, "
                f"basis has dimension {self.subspace.ambient_dim}"
            )
        object.__setattr__(self, "origin", origin)

    @classmethod
    def from_arrays(cls, origin: np.ndarray, basis: np.ndarray) -> "AffineSubspace":
        return cls(origin=origin, subspace=LinearSubspace(basis))

    @property
    def basis(self) -> np.ndarray:
        return self.subspace.basis

    @property
    def ambient_dim(self) -> int:
        return self.subspace.ambient_dim

    @property
    def rank(self) -> int:
        return self.subspace.rank


# ---------------------------------------------------------------------------
# Per-pair distances
# ---------------------------------------------------------------------------

def principal_angles(x: LinearSubspace, y: LinearSubspace) -> np.ndarray:
    """Principal angles between two subspaces, ascending, each in [0, pi/2].

    Returns ``min(rank_x, rank_y)`` angles.
    """
    _check_dims(x.ambient_dim, y.ambient_dim)
    return principal_angles_stacked(x.basis[None], y.basis)[0]


def geodesic_distance(x: LinearSubspace, y: LinearSubspace) -> float:
    """Grassmann geodesic distance ``||theta||_2``."""
    return float(np.linalg.norm(principal_angles(x, y)))


def projection_distance(x: LinearSubspace, y: LinearSubspace) -> float:
    """Grassmann projection distance ``||sin theta||_2``."""
    return float(np.linalg.norm(np.sin(principal_angles(x, y))))


def affine_distance(a: AffineSubspace, b: AffineSubspace, alpha: float) -> float:
    """Geodesic distance between the bases plus ``alpha`` times the origin term."""
    _check_dims(a.ambient_dim, b.ambient_dim)
    return float(
        affine_distances(a.origin[None], a.basis[None], b, alpha, DistanceKind.AFFINE)[0]
    )


def kl_distance(a: AffineSubspace, b: AffineSubspace, sigma2: float) -> float:
    """Symmetric KL distance for covariances ``sigma2 * I + U U^T`` (equal ranks)."""
    _check_dims(a.ambient_dim, b.ambient_dim)
    return float(kl_distances(a.origin[None], a.basis[None], b, sigma2)[0])


def mahalanobis_term(a: AffineSubspace, b: AffineSubspace) -> float:
    """``d^T (2I - U_A U_A^T - U_B U_B^T) d`` with ``d = mu_A - mu_B``."""
    _check_dims(a.ambient_dim, b.ambient_dim)
    return float(mahalanobis_terms(a.origin[None], a.basis[None], b)[0])


# ---------------------------------------------------------------------------
# Stacked kernels
# ---------------------------------------------------------------------------

def principal_angles_stacked(bases: np.ndarray, other: np.ndarray) -> np.ndarray:
    """Principal angles between each ``bases[i]`` (``D x p``) and ``other``.

    ``other`` is either one ``D x q`` basis or a stack matching ``bases``.
    Cosines come from the singular values of ``X^T Y``; angles whose
    cosine exceeds ``1/sqrt(2)`` are taken from the sines instead, the
    singular values of ``(I - X X^T) Y``, which stay accurate near zero.

    Returns:
        Array of shape ``(B, min(p, q))``, ascending along the last axis.
    """
    x = np.asarray(bases, dtype=np.float64)
    y = np.asarray(other, dtype=np.float64)
    if y.ndim == 2:
        y = np.broadcast_to(y, (x.shape[0],) + y.shape)
    if x.shape[1] != y.shape[1]:
        raise InvalidInputError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    if x.shape[2] < y.shape[2]:
        x, y = y, x

    batch, q = x.shape[0], y.shape[2]
    if q == 0:
        return np.zeros((batch, 0))

    cross = np.swapaxes(x, 1, 2) @ y
    residual = y - x @ cross
    if q == 1:
        cos2 = np.sum(cross * cross, axis=1)
        sin2 = np.sum(residual * residual, axis=1)
    else:
        # Both Gram matrices go through one eigensolve.
        grams = np.concatenate(
            [np.swapaxes(cross, 1, 2) @ cross, np.swapaxes(residual, 1, 2) @ residual]
        )
        _, eigenvalues = sym_eig(_symmetric(grams))
        cos2, sin2 = eigenvalues[:batch], eigenvalues[batch:, ::-1]
    cosines = np.sqrt(np.clip(cos2, 0.0, 1.0))
    sines = np.sqrt(np.clip(sin2, 0.0, 1.0))

    return np.where(cosines * cosines < 0.5, np.arccos(cosines), np.arcsin(sines))


def mahalanobis_terms(
    origins: np.ndarray, bases: np.ndarray, model: "AffineSubspace"
) -> np.ndarray:
    """Origin term ``2|d|^2 - (|U_i^T d|^2 + |U_m^T d|^2)`` for each candidate."""
    delta = np.asarray(origins, dtype=np.float64) - model.origin
    own = np.einsum("bdr,bd->br", bases, delta)
    theirs = delta @ model.basis
    value = 2.0 * np.sum(delta * delta, axis=1) - (
        np.sum(own * own, axis=1) + np.sum(theirs * theirs, axis=1)
    )
    return np.maximum(value, 0.0)


def affine_distances(
    origins: np.ndarray,
    bases: np.ndarray,
    model: AffineSubspace,
    alpha: float,
    kind: DistanceKind = DistanceKind.AFFINE,
) -> np.ndarray:
    """Affine distance from each candidate ``(origins[i], bases[i])`` to ``model``.

    ``kind`` selects the Grassmann part: geodesic for ``AFFINE`` and
    ``LINEAR``, projection for ``PROJECTION``.
    """
    if alpha < 0.0:
        raise InvalidInputError(f"alpha must be >= 0, got {alpha}")
    origins, bases = _check_stack(origins, bases, model)
    angles = principal_angles_stacked(bases, model.basis)
    if kind is DistanceKind.PROJECTION:
        grassmann = np.sqrt(np.sum(np.sin(angles) ** 2, axis=1))
    else:
        grassmann = np.sqrt(np.sum(angles * angles, axis=1))
    if alpha == 0.0:
        return grassmann
    return grassmann + alpha * mahalanobis_terms(origins, bases, model)


def kl_distances(
    origins: np.ndarray,
    bases: np.ndarray,
    model: AffineSubspace,
    sigma2: float,
    *,
    strict_rank: bool = True,
) -> np.ndarray:
    """Symmetric KL distance from each candidate to ``model``.

    ``(1/(2 s2)) d^T M d + (1/(2 s2 (s2 + 1))) (2n - 2 ||U_1^T U_2||_F^2)``

    With ``strict_rank=False`` unequal ranks are accepted and ``2n`` becomes
    ``r_1 + r_2`` (the trace of ``U_1 U_1^T + U_2 U_2^T``); the tracker
    needs this for degenerate candidate sets.
    """
    if not sigma2 > 0.0:
        raise InvalidInputError(f"sigma^2 must be > 0, got {sigma2}")
    origins, bases = _check_stack(origins, bases, model)
    n = bases.shape[2]
    if strict_rank and n != model.rank:
        raise InvalidInputError(f"KL distance needs equal ranks, got {n} and {model.rank}")
    cross = np.swapaxes(bases, 1, 2) @ model.basis
    trace = np.sum(cross * cross, axis=(1, 2))
    quadratic = mahalanobis_terms(origins, bases, model)
    return quadratic / (2.0 * sigma2) + (float(n + model.rank) - 2.0 * trace) / (
        2.0 * sigma2 * (sigma2 + 1.0)
    )


def subspace_distance(
    a: AffineSubspace,
    b: AffineSubspace,
    kind: DistanceKind = DistanceKind.AFFINE,
    alpha: float = 1.0,
    kl_sigma2: float = 1.0,
) -> float:
    """Distance of the given kind between two affine subspaces."""
    _check_dims(a.ambient_dim, b.ambient_dim)
    return float(
        batch_distances(
            kind, a.origin[None], a.basis[None], np.array([a.rank]), b, alpha, kl_sigma2
        )[0]
    )


def batch_distances(
    kind: DistanceKind,
    origins: np.ndarray,
    bases: np.ndarray,
    ranks: np.ndarray,
    model: AffineSubspace,
    alpha: float,
    kl_sigma2: float,
) -> np.ndarray:
    """Distances from a candidate set with per-candidate ranks to one model.

    ``bases`` is ``(B, D, n)`` zero-padded beyond each candidate's rank;
    candidates are grouped by rank so each group is one stacked call.
    """
    ranks = np.asarray(ranks)
    out = np.empty(len(ranks))
    for rank in np.unique(ranks):
        sel = np.flatnonzero(ranks == rank)
        sub_bases = bases[sel][:, :, :rank]
        if kind is DistanceKind.KL:
            out[sel] = kl_distances(
                origins[sel], sub_bases, model, kl_sigma2, strict_rank=False
            )
        elif kind is DistanceKind.LINEAR:
            out[sel] = affine_distances(origins[sel], sub_bases, model, 0.0, kind)
        else:
            out[sel] = affine_distances(origins[sel], sub_bases, model, alpha, kind)
    return out


# ---------------------------------------------------------------------------
# Internal helpers
# ---------------------------------------------------------------------------

def _symmetric(stack: np.ndarray) -> np.ndarray:
    return 0.5 * (stack + np.swapaxes(stack, -1, -2))


def _check_dims(d1: int, d2: int) -> None:
    if d1 != d2:
        raise InvalidInputError(f"dimension mismatch: {d1} vs {d2}")


def _check_stack(
    origins: np.ndarray, bases: np.ndarray, model: AffineSubspace
) -> tuple[np.ndarray, np.ndarray]:
    origins = np.asarray(origins, dtype=np.float64)
    bases = np.asarray(bases, dtype=np.float64)
    if origins.ndim != 2 or bases.ndim != 3 or bases.shape[:2] != origins.shape:
        raise InvalidInputError(
            f"expected origins (B, D) and bases (B, D, r), got {origins.shape} and {bases.shape}"
        )
    _check_dims(origins.shape[1], model.ambient_dim)
    return origins, bases
