"""The kernel conditional-covariance objective and its gradient.

Given compositions x_1..x_n (rows of X), a candidate reduction matrix P,
and a centered response Gram matrix G_Y, the fit criterion is

    J(P) = eps * trace( (G_PX + n*eps*I)^{-1} G_Y ),

where G_PX is the doubly centered Gaussian Gram matrix of the reduced
points z_i = P x_i.  Small values mean the reduced points explain the
response as well as the full composition does.  ``conditional_trace``
returns the bare trace without the leading eps factor; since eps is held
fixed during a fit the two scales rank candidates identically, and both
are exposed because the eps-scaled one is what matches held-out
prediction error.

``krr_equivalent_loss`` evaluates the same quantity by a completely
different route, through the coefficients of a vector-valued kernel ridge
regression from z onto the response features:

    alpha = (G_PX + n*eps*I)^{-1} H Psi,
    loss  = n*eps^2 * sum_i ||alpha_i||^2 + eps * alpha^T K_PX alpha.

The two routes agree to roundoff, which the test suite exploits as a
cross-check of both implementations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .errors import DimensionMismatch, SolveFailure, TooFewSamples
from .kernels import GAUSSIAN, GramMatrix, KernelSpec, center_gram, gram


def _unwrap_centered(G_Y) -> np.ndarray:
    if isinstance(G_Y, GramMatrix):
        if not G_Y.centered:
            raise DimensionMismatch("response Gram matrix must be centered")
        return np.asarray(G_Y.values, dtype=float)
    return np.asarray(G_Y, dtype=float)


@dataclass
class ObjectiveContext:
    """Everything the objective needs besides the candidate matrix.

    X:        n x d composition rows.
    G_Y:      n x n centered response Gram matrix (GramMatrix or array).
    kernel_z: Gaussian kernel spec used on the reduced points.
    epsilon:  ridge regularizer, > 0.
    """

    X: np.ndarray
    G_Y: np.ndarray
    kernel_z: KernelSpec
    epsilon: float

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.G_Y = _unwrap_centered(self.G_Y)
        if self.X.ndim != 2:
            raise DimensionMismatch("X must be an n x d array")
        n = self.X.shape[0]
        if n < 2:
            raise TooFewSamples("need at least two samples")
        if self.G_Y.shape != (n, n):
            raise DimensionMismatch(
                f"G_Y has shape {self.G_Y.shape}, expected ({n}, {n})"
            )
        if self.kernel_z.kind != GAUSSIAN:
            raise DimensionMismatch("reduced-space kernel must be gaussian")
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise DimensionMismatch(f"epsilon={self.epsilon!r} must be > 0")

    @property
    def n(self) -> int:
        return self.X.shape[0]


def _reduced_grams(P, ctx: ObjectiveContext):
    """Uncentered and centered Gaussian Gram matrices of the rows of X P^T."""
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[1] != ctx.X.shape[1]:
        raise DimensionMismatch(
            f"P has shape {P.shape}, expected (m, {ctx.X.shape[1]})"
        )
    Z = ctx.X @ P.T
    K = gram(ctx.kernel_z, Z)
    G = center_gram(K)
    return Z, K.values, G.values


def _regularized_factor(G: np.ndarray, n: int, epsilon: float):
    try:
        return cho_factor(G + (n * epsilon) * np.eye(n), lower=True)
    except LinAlgError as exc:  # pragma: no cover - requires pathological input
        raise SolveFailure(f"centered Gram + n*eps*I is not PD: {exc}") from exc


def conditional_trace(P, ctx: ObjectiveContext) -> float:
    """trace((G_PX + n*eps*I)^{-1} G_Y), without the eps prefactor."""
    _, _, G = _reduced_grams(P, ctx)
    n = ctx.n
    factor = _regularized_factor(G, n, ctx.epsilon)
    return float(np.trace(cho_solve(factor, ctx.G_Y)))


def trace_objective(P, ctx: ObjectiveContext) -> float:
    """eps * trace((G_PX + n*eps*I)^{-1} G_Y); the quantity being minimized."""
    return ctx.epsilon * conditional_trace(P, ctx)


def trace_gradient(P, ctx: ObjectiveContext) -> np.ndarray:
    """Gradient of ``trace_objective`` with respect to the entries of P.

    With A = (G_PX + n*eps*I)^{-1} and M = -eps * H A G_Y A H, the chain
    rule through the Gaussian kernel gives

        dJ/dP = -(1/sigma^2) * sum_ij M_ij K_ij (z_i - z_j)(x_i - x_j)^T,

    which collapses to -(2/sigma^2) * Z^T (diag(W 1) - W) X for the
    symmetric weight matrix W = M * K (entrywise).
    """
    Z, K, G = _reduced_grams(P, ctx)
    n = ctx.n
    factor = _regularized_factor(G, n, ctx.epsilon)
    B = cho_solve(factor, ctx.G_Y)          # A G_Y
    C = cho_solve(factor, B.T)              # A G_Y A (symmetric in exact math)
    C = 0.5 * (C + C.T)
    # M = -eps * H C H via double centering
    M = C - C.mean(axis=1, keepdims=True) - C.mean(axis=0, keepdims=True) + C.mean()
    M *= -ctx.epsilon
    W = M * K
    r = W.sum(axis=1)
    sigma = ctx.kernel_z.sigma
    return (-2.0 / sigma**2) * ((Z.T * r) @ ctx.X - Z.T @ (W @ ctx.X))


def krr_equivalent_loss(P, ctx: ObjectiveContext, K_Y) -> float:
    """Ridge-regression form of the objective, computed independently.

    ``K_Y`` is the *uncentered* response Gram matrix.  The coefficient
    block is alpha = (G_PX + n*eps*I)^{-1} H Psi, so with
    W = (G_PX + n*eps*I)^{-1} H the Gram matrix of the coefficient rows is
    B = W K_Y W^T and the loss is n*eps^2*trace(B) + eps*sum(K_PX * B).
    Uses a generic LU solve on purpose, to stay independent of the
    Cholesky route used by ``trace_objective``.
    """
    if isinstance(K_Y, GramMatrix):
        if K_Y.centered:
            raise DimensionMismatch("K_Y must be the uncentered response Gram")
        K_Y = K_Y.values
    K_Y = np.asarray(K_Y, dtype=float)
    _, K, G = _reduced_grams(P, ctx)
    n = ctx.n
    if K_Y.shape != (n, n):
        raise DimensionMismatch(f"K_Y has shape {K_Y.shape}, expected ({n}, {n})")
    H = np.eye(n) - np.ones((n, n)) / n
    try:
        Wmat = np.linalg.solve(G + (n * ctx.epsilon) * np.eye(n), H)
    except np.linalg.LinAlgError as exc:
        raise SolveFailure(str(exc)) from exc
    B = Wmat @ K_Y @ Wmat.T
    eps = ctx.epsilon
    return float(n * eps**2 * np.trace(B) + eps * np.sum(K * B))
