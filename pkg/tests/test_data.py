from __future__ import annotations

import numpy as np
import pytest

from ckdr.data import Dataset, ingest_csv, write_dataset_csv
from ckdr.errors import (
    DimensionMismatch,
    DimensionTooSmall,
    MissingResponse,
    NegativeCount,
    NotNormalized,
    RowSumZero,
    UnmappableLabel,
)


def write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestIngest:
    def test_reads_simple_table(self, tmp_path):
        p = write(tmp_path, "y,a,b,c\n1.5,0.2,0.3,0.5\n-0.5,0.1,0.1,0.8\n")
        ds = ingest_csv(p)
        assert ds.n == 2 and ds.d == 3
        assert ds.feature_names == ["a", "b", "c"]
        assert ds.response_kind == "real"
        np.testing.assert_array_equal(ds.y, [1.5, -0.5])

    def test_sign_labels_detected_as_binary(self, tmp_path):
        p = write(tmp_path, "y,a,b,c\n1,0.2,0.3,0.5\n-1,0.1,0.1,0.8\n")
        assert ingest_csv(p).response_kind == "binary"

    def test_binary_map_applied(self, tmp_path):
        p = write(tmp_path, "y,a,b,c\nsick,0.2,0.3,0.5\nwell,0.1,0.1,0.8\n")
        ds = ingest_csv(p, binary_map={"sick": 1, "well": -1})
        np.testing.assert_array_equal(ds.y, [1.0, -1.0])
        assert ds.response_kind == "binary"

    def test_unmapped_label_rejected(self, tmp_path):
        p = write(tmp_path, "y,a,b,c\nsick,0.2,0.3,0.5\nodd,0.1,0.1,0.8\n")
        with pytest.raises(UnmappableLabel):
            ingest_csv(p, binary_map={"sick": 1, "well": -1})

    def test_string_response_without_map_rejected(self, tmp_path):
        p = write(tmp_path, "y,a,b,c\nsick,0.2,0.3,0.5\n")
        with pytest.raises(UnmappableLabel):
            ingest_csv(p)

    def test_missing_response_column(self, tmp_path):
        p = write(tmp_path, "a,b,c\n0.2,0.3,0.5\n")
        with pytest.raises(MissingResponse):
            ingest_csv(p)

    def test_unlabelled_table_allowed_when_optional(self, tmp_path):
        p = write(tmp_path, "a,b,c\n0.2,0.3,0.5\n")
        ds = ingest_csv(p, require_response=False)
        assert ds.y is None and ds.response_kind is None

    def test_counts_normalized_on_request(self, tmp_path):
        p = write(tmp_path, "y,a,b,c\n1,4,6,10\n-1,1,0,3\n")
        ds = ingest_csv(p, normalize=True)
        np.testing.assert_allclose(ds.X.sum(axis=1), 1.0, atol=1e-15)
        np.testing.assert_allclose(ds.X[0], [0.2, 0.3, 0.5], rtol=1e-15)

    def test_unnormalized_rows_rejected_without_flag(self, tmp_path):
        p = write(tmp_path, "y,a,b,c\n1,4,6,10\n")
        with pytest.raises(NotNormalized):
            ingest_csv(p)

    def test_zero_row_rejected_under_normalize(self, tmp_path):
        p = write(tmp_path, "y,a,b,c\n1,0,0,0\n")
        with pytest.raises(RowSumZero):
            ingest_csv(p, normalize=True)

    def test_negative_feature_rejected(self, tmp_path):
        p = write(tmp_path, "y,a,b,c\n1,-0.1,0.6,0.5\n")
        with pytest.raises(NegativeCount):
            ingest_csv(p)

    def test_non_numeric_feature_rejected(self, tmp_path):
        p = write(tmp_path, "y,a,b,c\n1,lots,0.6,0.5\n")
        with pytest.raises(NegativeCount):
            ingest_csv(p)

    def test_prevalence_filter_drops_rare_features(self, tmp_path):
        # feature b is nonzero in only one of three samples
        p = write(
            tmp_path,
            "y,a,b,c,d\n1,1,0,2,1\n-1,2,0,1,1\n1,1,3,4,2\n",
        )
        ds = ingest_csv(p, normalize=True, min_prevalence=2)
        assert ds.feature_names == ["a", "c", "d"]
        assert ds.d == 3

    def test_prevalence_filter_runs_before_normalization(self, tmp_path):
        p = write(tmp_path, "y,a,b,c,d\n1,1,1,2,1\n-1,2,0,1,1\n")
        ds = ingest_csv(p, normalize=True, min_prevalence=2)
        # dropped column b no longer contributes to the row sums
        np.testing.assert_allclose(ds.X[0], [0.25, 0.5, 0.25], rtol=1e-15)

    def test_too_few_surviving_features(self, tmp_path):
        p = write(tmp_path, "y,a,b,c\n1,1,0,2\n-1,2,0,1\n")
        with pytest.raises(DimensionTooSmall):
            ingest_csv(p, normalize=True, min_prevalence=2)

    def test_empty_table_rejected(self, tmp_path):
        p = write(tmp_path, "y,a,b,c\n")
        with pytest.raises(DimensionMismatch):
            ingest_csv(p)


class TestWrite:
    def test_round_trip_is_bit_exact(self, tmp_path):
        rng = np.random.default_rng(130)
        X = rng.dirichlet(np.ones(5), size=8)
        y = rng.normal(size=8)
        p = tmp_path / "out.csv"
        write_dataset_csv(p, X, y)
        ds = ingest_csv(p)
        assert np.array_equal(ds.X, X)
        assert np.array_equal(ds.y, y)
        assert ds.feature_names == [f"x{j}" for j in range(1, 6)]

    def test_unlabelled_round_trip(self, tmp_path):
        rng = np.random.default_rng(131)
        X = rng.dirichlet(np.ones(4), size=5)
        p = tmp_path / "out.csv"
        write_dataset_csv(p, X)
        ds = ingest_csv(p, require_response=False)
        assert np.array_equal(ds.X, X)

    def test_custom_names_preserved(self, tmp_path):
        X = np.array([[0.2, 0.3, 0.5]])
        p = tmp_path / "out.csv"
        write_dataset_csv(p, X, feature_names=["taxA", "taxB", "taxC"])
        assert p.read_text().splitlines()[0] == "taxA,taxB,taxC"

    def test_name_length_mismatch(self, tmp_path):
        with pytest.raises(DimensionMismatch):
            write_dataset_csv(tmp_path / "out.csv", np.ones((1, 3)) / 3, feature_names=["a"])

    def test_y_length_mismatch(self, tmp_path):
        with pytest.raises(DimensionMismatch):
            write_dataset_csv(tmp_path / "out.csv", np.ones((2, 3)) / 3, y=np.ones(3))
