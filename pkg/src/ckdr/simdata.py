"""Synthetic compositional regression problems with known low-dimensional truth.

Compositions are drawn by pushing a stationary AR(1) Gaussian vector
through the softmax map and truncating the smallest entries to zero, which
produces the sparse, spiky profiles typical of relative-abundance data.
Responses depend on the compositions only through three blocks of parts
(the first 20%, next 30%, and last 50%), so the minimal sufficient
reduction subspace is known exactly and recovery can be scored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstantBeta, DimensionMismatch, DimensionTooSmall
from .metrics import Subspace

SETTINGS = ("i", "ii", "iii", "iv")

#: target dimension of the minimal sufficient reduction for each setting
M_STAR = {"i": 2, "ii": 3, "iii": 2, "iv": 3}

#: whether the generated response is real-valued or a -1/+1 label
RESPONSE_KIND = {"i": "real", "ii": "real", "iii": "binary", "iv": "binary"}


@dataclass(frozen=True)
class SimSpec:
    """Parameters of one synthetic data draw."""

    setting: str
    n: int
    d: int = 100
    ar_rho: float = 0.2
    trunc_frac: float = 0.5
    noise_scale: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.setting not in SETTINGS:
            raise DimensionMismatch(f"unknown setting {self.setting!r}")
        if self.n < 1:
            raise DimensionMismatch("n must be positive")
        if self.d < 3:
            raise DimensionTooSmall("need at least three parts")
        if not (0.0 <= self.trunc_frac < 1.0):
            raise DimensionMismatch("trunc_frac must lie in [0, 1)")
        if not abs(self.ar_rho) < 1.0:
            raise DimensionMismatch("ar_rho must lie in (-1, 1)")


def block_boundaries(d: int) -> tuple[int, int]:
    """Split points (c1, c2): blocks are [0:c1), [c1:c2), [c2:d)."""
    if d < 3:
        raise DimensionTooSmall("need at least three parts")
    c1 = min(max(int(round(0.2 * d)), 1), d - 2)
    c2 = min(max(int(round(0.5 * d)), c1 + 1), d - 1)
    return c1, c2


def block_labels(d: int) -> np.ndarray:
    """Ground-truth block index (0, 1, or 2) of every part."""
    c1, c2 = block_boundaries(d)
    labels = np.full(d, 2, dtype=int)
    labels[:c1] = 0
    labels[c1:c2] = 1
    return labels


def sample_compositions(spec: SimSpec) -> np.ndarray:
    """Draw n sparse compositions (softmax of AR(1) noise, then truncation).

    Row i uses its own generator seeded with (seed, 0, i), so the draw is
    reproducible row by row and independent of any batching.  After the
    softmax, the floor(trunc_frac * d) smallest entries of each row are
    zeroed (ties broken toward lower indices) and the rest renormalized.
    """
    d = spec.d
    idx = np.abs(np.subtract.outer(np.arange(d), np.arange(d)))
    cov = np.float_power(spec.ar_rho, idx) if spec.ar_rho != 0.0 else np.eye(d)
    L = np.linalg.cholesky(cov)
    n_cut = int(np.floor(spec.trunc_frac * d))
    X = np.empty((spec.n, d))
    for i in range(spec.n):
        g = np.random.default_rng([spec.seed, 0, i]).standard_normal(d)
        w = L @ g
        w -= w.max()
        p = np.exp(w)
        p /= p.sum()
        if n_cut:
            order = np.argsort(p, kind="stable")
            p[order[:n_cut]] = 0.0
            p /= p.sum()
        X[i] = p
    return X


def generate_responses(X, spec: SimSpec) -> np.ndarray:
    """Responses for the rows of X under the chosen setting.

    The noise stream is seeded with (seed, 1) and is independent of the
    composition stream.  Binary settings return -1/+1 labels with the
    boundary value mapped to +1.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != spec.d:
        raise DimensionMismatch(f"X must be n x {spec.d}")
    n = X.shape[0]
    c1, c2 = block_boundaries(spec.d)
    z1 = X[:, :c1].sum(axis=1)
    z2 = X[:, c1:c2].sum(axis=1)
    z3 = X[:, c2:].sum(axis=1)
    noise = spec.noise_scale * np.random.default_rng([spec.seed, 1]).standard_normal(n)
    if spec.setting == "i":
        return -5.0 * z1 + 4.0 * z3 + noise
    if spec.setting == "ii":
        return 3.0 * np.cos(z1) + z3**2 / (z2 + 0.01) + noise
    if spec.setting == "iii":
        raw = 5.0 * z2 - 3.0 * z3 + noise
    else:  # "iv"
        raw = 3.0 * z1**2 + 4.0 * z2**2 - 2.0 * z3**2 + noise
    return np.where(raw >= 0.0, 1.0, -1.0)


def true_subspace(setting: str, d: int) -> Subspace:
    """The minimal sufficient reduction subspace of the chosen setting.

    For the settings whose response depends on a single linear score
    beta^T x, this is span{1, beta}; for the genuinely two-dimensional
    settings it is the span of the ones vector and two block indicators.
    """
    if setting not in SETTINGS:
        raise DimensionMismatch(f"unknown setting {setting!r}")
    c1, c2 = block_boundaries(d)
    ones = np.ones(d)
    ind1 = np.zeros(d)
    ind1[:c1] = 1.0
    ind2 = np.zeros(d)
    ind2[c1:c2] = 1.0
    ind3 = np.zeros(d)
    ind3[c2:] = 1.0
    if setting == "i":
        return Subspace(np.vstack([ones, -5.0 * ind1 + 4.0 * ind3]))
    if setting == "iii":
        return Subspace(np.vstack([ones, 5.0 * ind2 - 3.0 * ind3]))
    return Subspace(np.vstack([ones, ind1, ind2]))


def relative_shift_cdr(beta) -> np.ndarray:
    """The exact 2 x d reduction matrix for a linear score y = beta^T x.

    Shifting and rescaling beta into [0, 1] gives the second row; the
    first row is its complement.  Together with ``relative_shift_readout``
    this reproduces beta^T x exactly from the two reduced coordinates.
    """
    beta = np.asarray(beta, dtype=float)
    if beta.ndim != 1 or beta.size < 2:
        raise DimensionMismatch("beta must be a vector with at least two entries")
    bmin, bmax = float(beta.min()), float(beta.max())
    if bmax == bmin:
        raise ConstantBeta("all coefficients equal; any composition gives the same score")
    top = (bmax - beta) / (bmax - bmin)
    return np.vstack([top, 1.0 - top])


def relative_shift_readout(beta) -> tuple[np.ndarray, float]:
    """Coefficients (a, c) with a^T (P x) + c = beta^T x for P = relative_shift_cdr(beta)."""
    beta = np.asarray(beta, dtype=float)
    bmin, bmax = float(beta.min()), float(beta.max())
    if bmax == bmin:
        raise ConstantBeta("all coefficients equal")
    return np.array([bmin - bmax, 0.0]), bmax
