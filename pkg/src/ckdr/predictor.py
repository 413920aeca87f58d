"""Dual kernel ridge predictor on the reduced simplex.

Fitting a reduction matrix P and regressing the response features on the
reduced points z_i = P x_i with ridge regularizer n*eps yields prediction
weights that live entirely in the dual: for a new point x', the feature
estimate is a weighted combination sum_i v_i(x') psi(y_i) with

    v(x') = H (G_PX + n*eps*I)^{-1} ktilde(x') + (1/n) 1,

where ktilde(x') centers the kernel column of x' against the training
block.  The weights always sum to one.  The squared feature-space error
of the estimate at a labelled point (x', y') expands through the kernel:

    E(x', y') = k_Y(y', y') - 2 k_y'^T v + v^T K_Y v,

which for the linear response kernel is exactly (y' - yhat)^2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .errors import (
    DimensionMismatch,
    SolveFailure,
    TooFewSamples,
    WrongResponseKernel,
)
from .kernels import GAUSSIAN, GramMatrix, KernelSpec, center_gram, gram

MODEL_FORMAT_VERSION = 1


@dataclass
class FittedModel:
    """A reduction matrix plus everything needed to predict from it.

    responses is the 1-D array of training y values when the response
    kernel is linear, or the full uncentered response Gram matrix when
    only kernel evaluations were available.
    """

    P_hat: np.ndarray
    kernel_z: KernelSpec
    epsilon: float
    train_projections: np.ndarray  # n x m
    dual_weights: np.ndarray       # n x n, equals H (G_PX + n eps I)^{-1}
    responses: np.ndarray
    seed: int | None = None
    objective: float | None = None

    @property
    def n(self) -> int:
        return self.train_projections.shape[0]

    @property
    def m(self) -> int:
        return self.P_hat.shape[0]

    @property
    def d(self) -> int:
        return self.P_hat.shape[1]

    @cached_property
    def train_gram_column_means(self) -> np.ndarray:
        """(1/n) K_PX 1, recomputed once from the stored projections."""
        K = gram(self.kernel_z, self.train_projections).values
        return K.mean(axis=1)


def fit_dual(P, X, K_Y, kernel_z: KernelSpec, epsilon: float, y=None) -> FittedModel:
    """Assemble the dual predictor for a fixed reduction matrix.

    Args:
        P: m x d reduction matrix.
        X: n x d training compositions.
        K_Y: uncentered response Gram matrix (GramMatrix or array).
        kernel_z: Gaussian kernel for the reduced space.
        epsilon: ridge regularizer, > 0.
        y: optional 1-D training responses; when given they are stored so
            the model can produce real-valued and signed predictions.
    """
    # C-order copy for the same reason as the dual block below: predictions
    # must not depend on whether P arrived as a transpose view
    P = np.ascontiguousarray(np.asarray(P, dtype=float))
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or P.ndim != 2 or P.shape[1] != X.shape[1]:
        raise DimensionMismatch("P and X disagree on the number of parts")
    n = X.shape[0]
    if n < 2:
        raise TooFewSamples("need at least two samples")
    if kernel_z.kind != GAUSSIAN:
        raise DimensionMismatch("reduced-space kernel must be gaussian")
    if not epsilon > 0:
        raise DimensionMismatch("epsilon must be > 0")
    if isinstance(K_Y, GramMatrix):
        if K_Y.centered:
            raise DimensionMismatch("K_Y must be uncentered")
        K_Y = K_Y.values
    K_Y = np.asarray(K_Y, dtype=float)
    if K_Y.shape != (n, n):
        raise DimensionMismatch(f"K_Y has shape {K_Y.shape}, expected ({n}, {n})")

    Z = X @ P.T
    G = center_gram(gram(kernel_z, Z)).values
    try:
        factor = cho_factor(G + (n * epsilon) * np.eye(n), lower=True)
    except LinAlgError as exc:
        raise SolveFailure(str(exc)) from exc
    H = np.eye(n) - np.ones((n, n)) / n
    # H and the inverse commute (H G = G H = G), so one solve gives both orders.
    # Copy to C order so predictions are bit-identical after a save/load round
    # trip (cho_solve hands back a Fortran-ordered array, and BLAS results
    # depend on operand layout).
    V = np.ascontiguousarray(cho_solve(factor, H))

    if y is not None:
        responses = np.asarray(y, dtype=float)
        if responses.shape != (n,):
            raise DimensionMismatch("y must be a length-n vector")
    else:
        responses = K_Y
    return FittedModel(
        P_hat=P,
        kernel_z=kernel_z,
        epsilon=epsilon,
        train_projections=Z,
        dual_weights=V,
        responses=responses,
    )


def _weights_for_projections(model: FittedModel, Z_new: np.ndarray) -> np.ndarray:
    """Weight matrix (n x q) for q query points given in the reduced simplex."""
    T = model.train_projections
    sq_t = np.sum(T * T, axis=1)
    sq_q = np.sum(Z_new * Z_new, axis=1)
    d2 = np.maximum(sq_t[:, None] + sq_q[None, :] - 2.0 * (T @ Z_new.T), 0.0)
    K = np.exp(-d2 / (2.0 * model.kernel_z.sigma**2))
    Ktilde = K - model.train_gram_column_means[:, None]
    return model.dual_weights @ Ktilde + 1.0 / model.n


def projection_weights(model: FittedModel, z) -> np.ndarray:
    """Prediction weights v for a point of the reduced simplex itself."""
    z = np.asarray(z, dtype=float)
    if z.shape != (model.m,):
        raise DimensionMismatch(f"expected a reduced point of length {model.m}")
    return _weights_for_projections(model, z[None, :])[:, 0]


def prediction_weights(model: FittedModel, x_new) -> np.ndarray:
    """Prediction weights v(x') for a new composition; they sum to one."""
    x_new = np.asarray(x_new, dtype=float)
    if x_new.shape != (model.d,):
        raise DimensionMismatch(f"expected a composition of length {model.d}")
    return projection_weights(model, model.P_hat @ x_new)


def out_of_sample_error(model: FittedModel, x_new, K_Y, k_y_cross, k_y_self: float) -> float:
    """Squared feature-space prediction error at a labelled point.

    K_Y is the uncentered training response Gram matrix, k_y_cross the
    vector of kernel evaluations between the training responses and the
    new response, and k_y_self the new response's self kernel value.
    Tiny negative results from roundoff are clamped to zero.
    """
    v = prediction_weights(model, x_new)
    K_Y = np.asarray(K_Y, dtype=float)
    k_y_cross = np.asarray(k_y_cross, dtype=float)
    err = float(k_y_self - 2.0 * (k_y_cross @ v) + v @ K_Y @ v)
    return max(err, 0.0)


def _linear_responses(model: FittedModel) -> np.ndarray:
    if model.responses.ndim != 1:
        raise WrongResponseKernel(
            "model stores a response Gram matrix, not linear-kernel y values"
        )
    return model.responses


def predict_real(model: FittedModel, x_new) -> float:
    """Real-valued prediction under the linear response kernel: v(x')^T y."""
    y = _linear_responses(model)
    return float(prediction_weights(model, x_new) @ y)


def predict_real_from_projection(model: FittedModel, z) -> float:
    """Same as ``predict_real`` but for a point given directly in the reduced simplex."""
    y = _linear_responses(model)
    return float(projection_weights(model, z) @ y)


def predict_real_many(model: FittedModel, X_new) -> np.ndarray:
    """Vectorized ``predict_real`` over the rows of ``X_new``."""
    y = _linear_responses(model)
    X_new = np.asarray(X_new, dtype=float)
    if X_new.ndim != 2 or X_new.shape[1] != model.d:
        raise DimensionMismatch(f"expected rows of length {model.d}")
    Z_new = X_new @ model.P_hat.T
    return _weights_for_projections(model, Z_new).T @ y


def predict_real_from_projections_many(model: FittedModel, Z_new) -> np.ndarray:
    """Vectorized ``predict_real_from_projection`` over the rows of ``Z_new``."""
    y = _linear_responses(model)
    Z_new = np.asarray(Z_new, dtype=float)
    if Z_new.ndim != 2 or Z_new.shape[1] != model.m:
        raise DimensionMismatch(f"expected reduced points of length {model.m}")
    return _weights_for_projections(model, Z_new).T @ y


def predict_class(model: FittedModel, x_new) -> int:
    """Signed prediction for -1/+1 responses; an exact zero maps to +1."""
    return 1 if predict_real(model, x_new) >= 0.0 else -1


def squared_prediction_error(model: FittedModel, x_new, y_new: float) -> float:
    """(y' - yhat)^2, the feature-space error under the linear response kernel."""
    return (float(y_new) - predict_real(model, x_new)) ** 2


# --- serialization -----------------------------------------------------------


def model_to_dict(model: FittedModel) -> dict:
    return {
        "version": MODEL_FORMAT_VERSION,
        "m": model.m,
        "d": model.d,
        "P": model.P_hat.tolist(),
        "kernel": {"kind": model.kernel_z.kind, "sigma": model.kernel_z.sigma},
        "epsilon": model.epsilon,
        "train_projections": model.train_projections.tolist(),
        "dual_weights": model.dual_weights.tolist(),
        "responses": model.responses.tolist(),
        "seed": model.seed,
        "objective": model.objective,
    }


def model_from_dict(doc: dict) -> FittedModel:
    version = doc.get("version")
    if version != MODEL_FORMAT_VERSION:
        raise DimensionMismatch(f"unsupported model format version {version!r}")
    P = np.asarray(doc["P"], dtype=float)
    if P.shape != (doc["m"], doc["d"]):
        raise DimensionMismatch("stored P does not match the declared shape")
    kernel = KernelSpec(doc["kernel"]["kind"], doc["kernel"]["sigma"])
    return FittedModel(
        P_hat=P,
        kernel_z=kernel,
        epsilon=float(doc["epsilon"]),
        train_projections=np.asarray(doc["train_projections"], dtype=float),
        dual_weights=np.asarray(doc["dual_weights"], dtype=float),
        responses=np.asarray(doc["responses"], dtype=float),
        seed=doc.get("seed"),
        objective=doc.get("objective"),
    )


def save_model(model: FittedModel, path) -> None:
    """Write the model as JSON; floats use shortest round-trip decimals."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=1)
        fh.write("\n")


def load_model(path) -> FittedModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
