"""Grid search with k-fold cross-validation.

For every (m, b, epsilon) cell and fold, the Gaussian bandwidth is the
median pairwise distance of the *training* part of the fold scaled by 2**b
(so no information from held-out samples leaks into the kernel), a
reduction matrix is fitted on the training part, and the mean squared
feature-space prediction error on the held-out part is recorded.  The best
cell minimizes the mean over folds, with exact ties resolved toward
smaller m, then smaller bandwidth, then larger epsilon.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CkdrError, DimensionMismatch, TooFewSamples
from .kernels import GAUSSIAN, LINEAR, KernelSpec, center_gram, gram, median_heuristic
from .optimizer import FitConfig, fit_ckdr
from .predictor import fit_dual, predict_real_many

#: hyperparameter grids used for the experiments this package reproduces
DEFAULT_M_VALUES = (3, 4, 5, 6, 7)
DEFAULT_B_VALUES = (-1.0, -0.5, 0.0, 0.5, 1.0)
DEFAULT_EPSILON_VALUES = (0.01, 0.001)


@dataclass(frozen=True)
class Grid:
    m_values: tuple[int, ...] = DEFAULT_M_VALUES
    b_values: tuple[float, ...] = DEFAULT_B_VALUES
    epsilon_values: tuple[float, ...] = DEFAULT_EPSILON_VALUES

    def __post_init__(self):
        if not self.m_values or not self.b_values or not self.epsilon_values:
            raise DimensionMismatch("grid axes must be nonempty")


@dataclass
class CVCell:
    m: int
    b: float
    epsilon: float
    fold_errors: list[float] = field(default_factory=list)
    fold_sigmas: list[float] = field(default_factory=list)
    mean_error: float | None = None
    failed: bool = False
    message: str = ""


@dataclass
class CVReport:
    cells: list[CVCell]
    best: tuple[int, float, float] | None
    fold_assignment: np.ndarray
    n_folds: int
    seed: int


def kfold_split(n: int, k: int, seed: int) -> np.ndarray:
    """Fold label (0..k-1) for each of n samples; sizes differ by at most one."""
    if not (2 <= k <= n):
        raise TooFewSamples(f"need 2 <= k <= n, got k={k}, n={n}")
    if seed < 0:
        raise DimensionMismatch("seed must be a nonnegative integer")
    perm = np.random.default_rng(seed).permutation(n)
    labels = np.empty(n, dtype=int)
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    start = 0
    for fold, size in enumerate(sizes):
        labels[perm[start : start + size]] = fold
        start += size
    return labels


def _cell_seed(seed: int, ci: int, fold: int) -> int:
    # stable 64-bit stream id per (cell, fold), independent of sweep order
    return int(np.random.SeedSequence([seed, ci, fold]).generate_state(1, np.uint64)[0])


def cross_validate(
    X,
    y,
    grid: Grid,
    n_folds: int = 5,
    fit_config: FitConfig | None = None,
    seed: int = 0,
) -> CVReport:
    """Sweep the grid with k-fold CV under the linear response kernel.

    ``fit_config`` supplies the optimizer budget (restarts, max_iters, ...);
    its m, sigma, and epsilon are overridden per cell.  Cells whose fits
    raise a package error are recorded as failed and excluded from
    selection rather than aborting the sweep.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise DimensionMismatch("X must be n x d with a matching response vector")
    n = X.shape[0]
    folds = kfold_split(n, n_folds, seed)
    base = fit_config if fit_config is not None else FitConfig(m=2)

    cells: list[CVCell] = []
    ci = 0
    for m in grid.m_values:
        for b in grid.b_values:
            for epsilon in grid.epsilon_values:
                cell = CVCell(m=m, b=b, epsilon=epsilon)
                try:
                    for fold in range(n_folds):
                        train = folds != fold
                        test = ~train
                        X_tr, y_tr = X[train], y[train]
                        sigma = 2.0**b * median_heuristic(X_tr)
                        config = replace(
                            base,
                            m=m,
                            sigma=sigma,
                            epsilon=epsilon,
                            seed=_cell_seed(seed, ci, fold),
                        )
                        K_Y = gram(KernelSpec(LINEAR), y_tr)
                        result = fit_ckdr(X_tr, center_gram(K_Y), config)
                        model = fit_dual(
                            result.P_hat, X_tr, K_Y, KernelSpec(GAUSSIAN, sigma),
                            epsilon, y=y_tr,
                        )
                        y_hat = predict_real_many(model, X[test])
                        cell.fold_errors.append(float(np.mean((y[test] - y_hat) ** 2)))
                        cell.fold_sigmas.append(sigma)
                    cell.mean_error = float(np.mean(cell.fold_errors))
                except CkdrError as exc:
                    cell.failed = True
                    cell.message = f"{exc.code}: {exc}"
                    cell.fold_errors = []
                    cell.fold_sigmas = []
                cells.append(cell)
                ci += 1

    return CVReport(
        cells=cells,
        best=select_best(cells),
        fold_assignment=folds,
        n_folds=n_folds,
        seed=seed,
    )


def select_best(cells: list[CVCell]) -> tuple[int, float, float] | None:
    """Cell with the smallest mean error; exact ties prefer smaller m, then
    smaller bandwidth scale b, then larger epsilon.  Failed cells never win."""
    viable = [c for c in cells if not c.failed and c.mean_error is not None]
    if not viable:
        return None
    chosen = min(viable, key=lambda c: (c.mean_error, c.m, c.b, -c.epsilon))
    return (chosen.m, chosen.b, chosen.epsilon)


def report_to_dict(report: CVReport) -> dict:
    return {
        "version": 1,
        "seed": report.seed,
        "n_folds": report.n_folds,
        "fold_assignment": report.fold_assignment.tolist(),
        "best": list(report.best) if report.best else None,
        "cells": [
            {
                "m": c.m,
                "b": c.b,
                "epsilon": c.epsilon,
                "fold_errors": c.fold_errors,
                "fold_sigmas": c.fold_sigmas,
                "mean_error": c.mean_error,
                "failed": c.failed,
                "message": c.message,
            }
            for c in report.cells
        ],
    }


def save_report(report: CVReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=1)
        fh.write("\n")


def format_report(report: CVReport) -> str:
    """Aligned text table of the sweep, best cell marked with '*'."""
    header = f"{'':2}{'m':>3} {'b':>6} {'epsilon':>9} {'mean_error':>12}  per-fold"
    lines = [header]
    for c in report.cells:
        mark = "* " if report.best == (c.m, c.b, c.epsilon) else "  "
        if c.failed:
            lines.append(f"{mark}{c.m:>3} {c.b:>6.2f} {c.epsilon:>9.4g} {'failed':>12}  {c.message}")
        else:
            per_fold = " ".join(f"{e:.4g}" for e in c.fold_errors)
            lines.append(
                f"{mark}{c.m:>3} {c.b:>6.2f} {c.epsilon:>9.4g} {c.mean_error:>12.6g}  {per_fold}"
            )
    return "\n".join(lines)
