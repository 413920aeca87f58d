"""Kernels, Gram matrices, double centering, and the median bandwidth rule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .errors import (
    AllPointsIdentical,
    AlreadyCentered,
    DimensionMismatch,
    NonFiniteInput,
    NonPositiveBandwidth,
    TooFewSamples,
    UnknownKernel,
)

GAUSSIAN = "gaussian"
LINEAR = "linear"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus parameters.

    kind: "gaussian" (bandwidth sigma required, > 0) or "linear".
    """

    kind: str
    sigma: float | None = None

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, LINEAR):
            raise UnknownKernel(f"unknown kernel kind {self.kind!r}")
        if self.kind == GAUSSIAN:
            if self.sigma is None or not np.isfinite(self.sigma) or self.sigma <= 0:
                raise NonPositiveBandwidth(f"sigma={self.sigma!r} must be > 0")


@dataclass
class GramMatrix:
    """A kernel Gram matrix together with its centering state."""

    values: np.ndarray
    centered: bool = False

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.dtype == object:
        raise DimensionMismatch("points have inconsistent lengths")
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise DimensionMismatch("points must form an n x p array")
    if not np.all(np.isfinite(pts)):
        raise NonFiniteInput("points contain NaN or inf")
    return pts


def _mirror_upper(K: np.ndarray, diag: np.ndarray) -> np.ndarray:
    # build the matrix from its upper triangle so symmetry is bit-exact
    U = np.triu(K, 1)
    out = U + U.T
    np.fill_diagonal(out, diag)
    return out


def gram(spec: KernelSpec, points) -> GramMatrix:
    """Uncentered Gram matrix K_ij = k(p_i, p_j) for the given kernel."""
    pts = _as_points(points)
    n = pts.shape[0]
    if n < 1:
        raise TooFewSamples("need at least one point")
    inner = pts @ pts.T
    if spec.kind == LINEAR:
        K = _mirror_upper(inner, np.einsum("ij,ij->i", pts, pts))
        return GramMatrix(K, centered=False)
    sq = np.sum(pts * pts, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * inner, 0.0)
    K = np.exp(-d2 / (2.0 * spec.sigma**2))
    K = _mirror_upper(K, np.ones(n))
    return GramMatrix(K, centered=False)


def center_gram(K: GramMatrix) -> GramMatrix:
    """Double centering G = H K H with H = I - (1/n) 11^T.

    Implemented by subtracting row means, column means, and adding back the
    grand mean; the result is mirrored from its upper triangle so it stays
    bit-exact symmetric.
    """
    if K.centered:
        raise AlreadyCentered("Gram matrix is already centered")
    V = K.values
    row = V.mean(axis=1, keepdims=True)
    col = V.mean(axis=0, keepdims=True)
    G = V - row - col + V.mean()
    G = _mirror_upper(G, np.diag(G).copy())
    return GramMatrix(G, centered=True)


def median_heuristic(X) -> float:
    """Median of all pairwise Euclidean distances among the rows of X."""
    pts = _as_points(X)
    if pts.shape[0] < 2:
        raise TooFewSamples("median bandwidth needs at least two points")
    dists = pdist(pts)
    if dists.max() == 0.0:
        raise AllPointsIdentical("all pairwise distances are zero")
    med = float(np.median(dists))
    if med <= 0.0:
        # more than half the pairs coincide; a zero bandwidth is unusable
        raise NonPositiveBandwidth("median pairwise distance is zero")
    return med
