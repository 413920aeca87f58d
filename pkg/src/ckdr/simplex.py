"""Simplex geometry: compositions, column-stochastic reduction matrices,
Euclidean projection onto the probability simplex, and amalgamations.

A composition is a vector with nonnegative entries summing to one, i.e. a
point of the probability simplex.  A reduction matrix maps a d-part
composition to an m-part one (m <= d); it is column stochastic, so each
original part distributes its total mass across the reduced parts.  Hard
0/1 reduction matrices are exactly the classical amalgamations that pool
parts into disjoint blocks.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    DegenerateBasis,
    DimensionMismatch,
    InvalidPartition,
    NegativeEntry,
    NonFiniteInput,
    NotNormalized,
    OneVectorNotInSpan,
    ZeroVector,
)

#: default tolerance on |sum - 1| for composition validation
SUM_TOL = 1e-9

#: default tolerance for span membership tests (relative to vector norm)
SPAN_TOL = 1e-8


def validate_composition(v, tol: float = SUM_TOL, normalize: bool = False) -> np.ndarray:
    """Check that ``v`` is a composition; optionally rescale it to unit sum.

    Entries must be finite and >= -tol, and the sum must be within ``tol``
    of one unless ``normalize`` is set, in which case any vector with
    positive total mass is clipped at zero and rescaled.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got array of ndim {v.ndim}")
    if v.size < 2:
        raise DimensionMismatch("a composition needs at least two parts")
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput("composition contains NaN or inf")
    if np.any(v < -tol):
        raise NegativeEntry(f"entry {v.min():.3g} below -tol")
    if normalize:
        s = v.sum()
        if s <= 0.0:
            raise ZeroVector("cannot normalize a vector with nonpositive sum")
        return np.maximum(v, 0.0) / np.maximum(v, 0.0).sum()
    if abs(v.sum() - 1.0) > tol:
        raise NotNormalized(f"entries sum to {v.sum():.12g}, not 1")
    return v


def validate_cdr_matrix(P, tol: float = SUM_TOL) -> np.ndarray:
    """Check that ``P`` is column stochastic with entries in [0, 1]."""
    P = np.asarray(P, dtype=float)
    if P.ndim != 2:
        raise DimensionMismatch("reduction matrix must be 2-D")
    m, d = P.shape
    if m > d:
        raise DimensionMismatch(f"target dimension {m} exceeds source dimension {d}")
    if not np.all(np.isfinite(P)):
        raise NonFiniteInput("matrix contains NaN or inf")
    if np.any(P < -tol) or np.any(P > 1.0 + tol):
        raise NegativeEntry("entries must lie in [0, 1]")
    colsums = P.sum(axis=0)
    if np.any(np.abs(colsums - 1.0) > tol):
        j = int(np.argmax(np.abs(colsums - 1.0)))
        raise NotNormalized(f"column {j} sums to {colsums[j]:.12g}, not 1")
    return P


def project_columns_to_simplex(M) -> np.ndarray:
    """Euclidean projection of every column of ``M`` onto the probability simplex.

    Sort-and-threshold algorithm: for each column, with entries sorted in
    decreasing order (ties kept in original index order), find the largest
    k such that u_k + (1 - sum_{j<=k} u_j)/k > 0, set the threshold
    theta = (sum_{j<=k} u_j - 1)/k, and return max(v - theta, 0).
    """
    M = np.asarray(M, dtype=float)
    squeeze = False
    if M.ndim == 1:
        M = M[:, None]
        squeeze = True
    if M.ndim != 2 or M.shape[0] < 1:
        raise DimensionMismatch("expected a vector or a 2-D array")
    if not np.all(np.isfinite(M)):
        raise NonFiniteInput("projection input contains NaN or inf")
    m = M.shape[0]
    # stable sort of -M gives decreasing order with ties broken by index
    U = -np.sort(-M, axis=0, kind="stable")
    css = np.cumsum(U, axis=0)
    k = np.arange(1, m + 1)[:, None]
    cond = U + (1.0 - css) / k > 0.0
    # the feasible index set is a prefix; take its largest element per column
    rho = np.where(cond, np.arange(m)[:, None], -1).max(axis=0)
    theta = (css[rho, np.arange(M.shape[1])] - 1.0) / (rho + 1.0)
    out = np.maximum(M - theta[None, :], 0.0)
    return out[:, 0] if squeeze else out


def project_vector_to_simplex(v) -> np.ndarray:
    """Euclidean projection of a single vector onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch("expected a vector")
    return project_columns_to_simplex(v)


def apply_cdr(P, x) -> np.ndarray:
    """Apply a reduction matrix to a composition: z = P x.

    Because the columns of P sum to one and x sums to one, z sums to one
    up to roundoff and is itself a composition.
    """
    P = np.asarray(P, dtype=float)
    x = np.asarray(x, dtype=float)
    if P.ndim != 2 or x.ndim != 1 or P.shape[1] != x.shape[0]:
        raise DimensionMismatch(
            f"cannot apply {P.shape} matrix to vector of length {x.shape}"
        )
    return P @ x


def amalgamation_matrix(blocks, d: int) -> np.ndarray:
    """Build the 0/1 reduction matrix that pools the given part blocks.

    ``blocks`` is a list of disjoint, nonempty collections of 0-based part
    indices covering range(d).  Row i of the result is the indicator of
    blocks[i].
    """
    if d < 1:
        raise DimensionMismatch("d must be positive")
    blocks = [np.asarray(sorted(b), dtype=int) for b in blocks]
    if len(blocks) == 0:
        raise InvalidPartition("no blocks given")
    seen = np.zeros(d, dtype=int)
    for b in blocks:
        if b.size == 0:
            raise InvalidPartition("empty block")
        if b.min() < 0 or b.max() >= d:
            raise InvalidPartition(f"block index out of range for d={d}")
        seen[b] += 1
    if np.any(seen != 1):
        raise InvalidPartition("blocks must be disjoint and cover every index")
    A = np.zeros((len(blocks), d))
    for i, b in enumerate(blocks):
        A[i, b] = 1.0
    return A


def detect_amalgamation(P, tol: float) -> list[list[int]]:
    """Group the columns of ``P`` that agree entrywise within ``tol``.

    Columns at max-norm distance <= tol are linked; blocks are the connected
    components of that relation (so agreement is made transitive).  Blocks
    are returned as sorted index lists, ordered by their smallest member.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2:
        raise DimensionMismatch("expected a matrix")
    d = P.shape[1]
    diff = np.max(np.abs(P[:, :, None] - P[:, None, :]), axis=0)
    adj = csr_matrix(diff <= tol)
    _, labels = connected_components(adj, directed=False)
    blocks: dict[int, list[int]] = {}
    for j in range(d):
        blocks.setdefault(int(labels[j]), []).append(j)
    # csgraph assigns labels in order of first occurrence, which sorts the
    # blocks by smallest member already; keep that canonical order
    return [blocks[k] for k in sorted(blocks, key=lambda k: blocks[k][0])]


def cdr_from_subspace(basis, span_tol: float = SPAN_TOL) -> np.ndarray:
    """Build a valid reduction matrix whose row space equals span(basis).

    ``basis`` holds k linearly independent d-vectors (rows) whose span
    contains the all-ones vector.  Construction: take an orthonormal basis
    u_1..u_{k-1} of the intersection of the span with the zero-sum
    hyperplane, append u_k = -(u_1 + ... + u_{k-1}), shift every u_i by
    N = 2 * max_i ||u_i||_inf + 1 times the ones vector, and divide by kN.
    Rows are then positive, columns sum to one up to machine rounding, and
    the row space is unchanged.
    """
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    if B.ndim != 2:
        raise DimensionMismatch("basis must be a k x d array")
    k, d = B.shape
    if k > d:
        raise DegenerateBasis(f"{k} vectors in dimension {d} cannot be independent")
    if not np.all(np.isfinite(B)):
        raise NonFiniteInput("basis contains NaN or inf")
    svals = np.linalg.svd(B, compute_uv=False)
    if svals[0] == 0.0 or svals[-1] <= span_tol * svals[0]:
        raise DegenerateBasis("basis vectors are numerically dependent")

    # orthonormal row basis of the span
    _, _, Vt = np.linalg.svd(B, full_matrices=False)
    Q = Vt[:k]
    one = np.ones(d)
    resid = one - Q.T @ (Q @ one)
    if np.linalg.norm(resid) > span_tol * np.sqrt(d):
        raise OneVectorNotInSpan("the all-ones vector is not in span(basis)")

    if k == 1:
        return np.ones((1, d))

    # orthonormal basis of span(basis) intersected with the zero-sum hyperplane:
    # center the rows (projection along the ones direction stays in the span)
    W = Q - np.outer(Q @ one / d, one)
    _, sw, Vtw = np.linalg.svd(W, full_matrices=False)
    U = Vtw[: k - 1]
    u_last = -U.sum(axis=0)
    rows = np.vstack([U, u_last[None, :]])
    N = 2.0 * np.max(np.abs(rows)) + 1.0
    P = (rows + N) / (k * N)
    return P
