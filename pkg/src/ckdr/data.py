"""CSV ingestion and writing for labelled composition tables.

The on-disk format is one header row followed by one sample per line; the
response column (default "y") may hold reals, -1/+1 labels, or arbitrary
category strings mapped through an explicit binary label map.  All other
columns are nonnegative feature counts or proportions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import (
    DimensionMismatch,
    DimensionTooSmall,
    MissingResponse,
    NegativeCount,
    NotNormalized,
    RowSumZero,
    UnmappableLabel,
)

#: format giving 17 significant digits, enough to round-trip any double
FLOAT_FMT = "%.17g"


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray | None
    feature_names: list[str]
    response_kind: str | None  # "real" or "binary"

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


def _map_labels(raw: pd.Series, binary_map: dict) -> np.ndarray:
    y = np.empty(len(raw), dtype=float)
    for i, lab in enumerate(raw):
        key = str(lab)
        if key not in binary_map:
            raise UnmappableLabel(f"label {key!r} missing from the binary map")
        y[i] = binary_map[key]
    return y


def ingest_csv(
    path,
    response_column: str = "y",
    normalize: bool = False,
    min_prevalence: int = 0,
    binary_map: dict | None = None,
    require_response: bool = True,
) -> Dataset:
    """Read a labelled composition table.

    Features nonzero in fewer than ``min_prevalence`` samples are dropped
    (before any normalization).  With ``normalize`` set, each remaining row
    is rescaled to unit sum; otherwise rows must already be compositions.
    ``binary_map`` maps response labels to -1/+1; without it the response
    must be numeric.  Column order is preserved.
    """
    # round_trip parsing keeps 17-digit floats bit-exact on the way back in
    df = pd.read_csv(path, float_precision="round_trip")
    if df.shape[0] == 0:
        raise DimensionMismatch("input table has no rows")
    y = None
    kind = None
    if response_column in df.columns:
        raw = df[response_column]
        if binary_map is not None:
            y = _map_labels(raw, binary_map)
            kind = "binary"
        else:
            y = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=float)
            if np.any(np.isnan(y)):
                raise UnmappableLabel(
                    "non-numeric response values; supply a binary label map"
                )
            kind = "binary" if set(np.unique(y)) <= {-1.0, 1.0} else "real"
        feats = df.drop(columns=[response_column])
    elif require_response:
        raise MissingResponse(f"no column named {response_column!r}")
    else:
        feats = df

    try:
        X = feats.to_numpy(dtype=float)
    except (TypeError, ValueError) as exc:
        raise NegativeCount(f"feature columns must be numeric: {exc}") from exc
    if not np.all(np.isfinite(X)):
        raise NegativeCount("feature table contains NaN or inf")
    if np.any(X < 0):
        raise NegativeCount("feature table contains negative entries")

    names = list(feats.columns)
    if min_prevalence > 0:
        keep = (X > 0).sum(axis=0) >= min_prevalence
        X = X[:, keep]
        names = [nm for nm, k in zip(names, keep) if k]
    if X.shape[1] < 3:
        raise DimensionTooSmall(
            f"{X.shape[1]} features remain; need at least three parts"
        )

    if normalize:
        sums = X.sum(axis=1)
        if np.any(sums <= 0):
            raise RowSumZero(f"row {int(np.argmax(sums <= 0))} sums to zero")
        X = X / sums[:, None]
    else:
        if np.any(np.abs(X.sum(axis=1) - 1.0) > 1e-9):
            raise NotNormalized(
                "rows do not sum to one; pass normalize to rescale counts"
            )
    return Dataset(X=X, y=y, feature_names=names, response_kind=kind)


def write_dataset_csv(path, X, y=None, feature_names=None, response_column: str = "y"):
    """Write a composition table with 17-significant-digit floats."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if feature_names is None:
        feature_names = [f"x{j + 1}" for j in range(d)]
    if len(feature_names) != d:
        raise DimensionMismatch("feature_names length does not match X")
    cols = list(feature_names)
    data = X
    if y is not None:
        y = np.asarray(y, dtype=float)
        if y.shape != (n,):
            raise DimensionMismatch("y length does not match X")
        cols = [response_column] + cols
        data = np.column_stack([y, X])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for row in data:
            fh.write(",".join(FLOAT_FMT % v for v in row) + "\n")
