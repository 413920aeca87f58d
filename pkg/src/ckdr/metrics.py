"""Evaluation metrics: subspace recovery, rank, and clustering agreement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.cluster import KMeans
from sklearn.metrics import adjusted_rand_score

from .errors import (
    DimensionMismatch,
    KTooLarge,
    LengthMismatch,
    ZeroDimensionalSubspace,
)

#: relative singular-value cutoff shared by rank and subspace routines
RANK_REL_TOL = 1e-6


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of R^d given by basis rows (k x d)."""

    basis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "basis", np.atleast_2d(np.asarray(self.basis, float)))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient(self) -> int:
        return self.basis.shape[1]


def _orthonormal_rows(basis: np.ndarray, rel_tol: float) -> np.ndarray:
    """Orthonormal basis of the row space, dropping numerically null directions."""
    _, s, Vt = np.linalg.svd(basis, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return Vt[:0]
    return Vt[s > rel_tol * s[0]]


def numerical_rank(A, rel_tol: float = RANK_REL_TOL) -> int:
    """Number of singular values above rel_tol times the largest one."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def chordal_distance(V, W, rel_tol: float = RANK_REL_TOL) -> float:
    """Normalized chordal distance between two subspaces, in [0, 1].

    With orthogonal projectors Pi_V, Pi_W onto subspaces of dimensions k
    and l, the squared distance is

        (||Pi_V - Pi_W||_F^2 - |k - l|) / (2 min(k, l)),

    which is 0 exactly when one subspace contains the other and 1 when
    they are orthogonal.  Inputs may be Subspace objects or basis-row
    arrays; bases are orthonormalized internally.
    """
    BV = V.basis if isinstance(V, Subspace) else np.atleast_2d(np.asarray(V, float))
    BW = W.basis if isinstance(W, Subspace) else np.atleast_2d(np.asarray(W, float))
    if BV.shape[1] != BW.shape[1]:
        raise DimensionMismatch("subspaces live in different ambient dimensions")
    QV = _orthonormal_rows(BV, rel_tol)
    QW = _orthonormal_rows(BW, rel_tol)
    k, l = QV.shape[0], QW.shape[0]
    if k == 0 or l == 0:
        raise ZeroDimensionalSubspace("cannot measure distance to a rank-0 subspace")
    # ||Pi_V - Pi_W||_F^2 = k + l - 2 ||QV QW^T||_F^2, so the normalized
    # squared distance collapses to 1 - ||QV QW^T||_F^2 / min(k, l).  That
    # subtraction loses half the mantissa near 0 (floor ~sqrt(eps)), so
    # compute the same quantity as the residual of projecting the smaller
    # basis onto the larger subspace: ||Qs - (Qs Qb^T) Qb||_F^2 / min(k, l).
    Qs, Qb = (QV, QW) if k <= l else (QW, QV)
    resid = Qs - (Qs @ Qb.T) @ Qb
    rho2 = np.linalg.norm(resid) ** 2 / min(k, l)
    if rho2 < -1e-12:  # pragma: no cover - sum of squares is nonnegative
        raise RuntimeError(f"chordal radicand {rho2:.3e} below roundoff floor")
    return float(np.sqrt(min(max(rho2, 0.0), 1.0)))


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Pair-counting Rand index corrected for chance agreement."""
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.ndim != 1 or b.ndim != 1:
        raise DimensionMismatch("label sequences must be 1-D")
    if a.shape[0] != b.shape[0]:
        raise LengthMismatch(f"{a.shape[0]} vs {b.shape[0]} labels")
    if a.shape[0] < 2:
        raise LengthMismatch("need at least two labelled items")
    return float(adjusted_rand_score(a, b))


def cluster_columns(P, k: int, seed: int = 0, restarts: int = 20) -> np.ndarray:
    """k-means cluster labels for the columns of ``P``.

    Lloyd iterations from k-means++ seeding, best of ``restarts`` runs by
    within-cluster sum of squares; deterministic given ``seed``.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    d = P.shape[1]
    if k < 1 or k > d:
        raise KTooLarge(f"cannot form {k} clusters from {d} columns")
    km = KMeans(
        n_clusters=k,
        n_init=restarts,
        init="k-means++",
        random_state=int(seed) % (2**32),
    )
    return km.fit_predict(P.T)
