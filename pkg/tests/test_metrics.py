from __future__ import annotations

import math

import numpy as np
import pytest

from ckdr.errors import DimensionMismatch, KTooLarge, LengthMismatch, ZeroDimensionalSubspace
from ckdr.metrics import (
    Subspace,
    adjusted_rand_index,
    chordal_distance,
    cluster_columns,
    numerical_rank,
)
from ckdr.simplex import amalgamation_matrix


class TestNumericalRank:
    def test_full_rank_identity(self):
        assert numerical_rank(np.eye(4)) == 4

    def test_rank_one_outer_product(self):
        v = np.arange(1.0, 6.0)
        assert numerical_rank(np.outer(v, v)) == 1

    def test_near_dependency_collapses(self):
        A = np.array([[1.0, 0.0], [1.0, 1e-9]])
        assert numerical_rank(A) == 1
        assert numerical_rank(A, rel_tol=1e-12) == 2

    def test_zero_matrix(self):
        assert numerical_rank(np.zeros((3, 3))) == 0


class TestChordalDistance:
    def test_identical_subspaces(self):
        V = Subspace(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
        assert chordal_distance(V, V) == 0.0

    def test_basis_invariance(self):
        rng = np.random.default_rng(100)
        B = rng.normal(size=(2, 6))
        mixed = np.array([[2.0, 1.0], [0.5, -1.0]]) @ B
        assert chordal_distance(Subspace(B), Subspace(mixed)) < 1e-12

    def test_orthogonal_lines(self):
        V = Subspace(np.array([[1.0, 0.0]]))
        W = Subspace(np.array([[0.0, 1.0]]))
        assert chordal_distance(V, W) == pytest.approx(1.0, abs=1e-15)

    def test_rotated_line_sine_rule(self):
        # 1-D subspaces at angle theta are sin(theta) apart; pi/6 gives 1/2
        theta = math.pi / 6
        V = Subspace(np.array([[1.0, 0.0]]))
        W = Subspace(np.array([[math.cos(theta), math.sin(theta)]]))
        assert chordal_distance(V, W) == pytest.approx(0.5, rel=1e-12)

    def test_contained_subspace_distance_zero(self):
        # a line inside a plane is at distance 0 by the min-rank convention
        plane = Subspace(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
        line = Subspace(np.array([[1.0, 1.0, 0.0]]))
        assert chordal_distance(line, plane) == pytest.approx(0.0, abs=1e-12)
        assert chordal_distance(plane, line) == pytest.approx(0.0, abs=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(101)
        V = Subspace(rng.normal(size=(2, 8)))
        W = Subspace(rng.normal(size=(3, 8)))
        assert chordal_distance(V, W) == pytest.approx(chordal_distance(W, V), abs=1e-12)

    def test_range_is_unit_interval(self):
        rng = np.random.default_rng(102)
        for _ in range(30):
            V = Subspace(rng.normal(size=(int(rng.integers(1, 4)), 7)))
            W = Subspace(rng.normal(size=(int(rng.integers(1, 4)), 7)))
            assert 0.0 <= chordal_distance(V, W) <= 1.0

    def test_dependent_rows_handled_by_rank(self):
        # duplicated row does not inflate the dimension
        V = Subspace(np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]))
        W = Subspace(np.array([[1.0, 0.0, 0.0]]))
        assert chordal_distance(V, W) == pytest.approx(0.0, abs=1e-12)

    def test_ambient_mismatch(self):
        with pytest.raises(DimensionMismatch):
            chordal_distance(Subspace(np.eye(3)), Subspace(np.eye(4)))

    def test_zero_subspace_rejected(self):
        with pytest.raises(ZeroDimensionalSubspace):
            chordal_distance(Subspace(np.zeros((1, 3))), Subspace(np.eye(3)))

    def test_accepts_raw_arrays(self):
        a = np.array([[1.0, 0.0]])
        b = np.array([[0.0, 2.0]])
        assert chordal_distance(a, b) == pytest.approx(1.0, abs=1e-15)


class TestAdjustedRandIndex:
    def test_perfect_agreement(self):
        assert adjusted_rand_index([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0

    def test_frozen_crossed_pairs(self):
        assert adjusted_rand_index([0, 0, 1, 1], [0, 1, 0, 1]) == -0.5

    def test_frozen_degenerate_split(self):
        assert adjusted_rand_index([0, 0, 0, 0], [0, 1, 2, 3]) == 0.0

    def test_label_permutation_invariant(self):
        rng = np.random.default_rng(103)
        a = rng.integers(0, 3, size=30)
        b = rng.integers(0, 3, size=30)
        remap = {0: 7, 1: 5, 2: 9}
        b2 = np.array([remap[v] for v in b])
        assert adjusted_rand_index(a, b) == adjusted_rand_index(a, b2)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            adjusted_rand_index([0, 1], [0, 1, 2])

    def test_too_short(self):
        with pytest.raises(LengthMismatch):
            adjusted_rand_index([0], [1])


class TestClusterColumns:
    def test_recovers_exact_amalgamation_blocks(self):
        A = amalgamation_matrix([[0, 1, 2], [3, 4], [5, 6, 7, 8, 9]], 10)
        labels = cluster_columns(A, k=3, seed=0)
        truth = np.array([0, 0, 0, 1, 1, 2, 2, 2, 2, 2])
        assert adjusted_rand_index(labels, truth) == 1.0

    def test_recovers_noisy_blocks(self):
        rng = np.random.default_rng(104)
        A = amalgamation_matrix([[0, 1, 2, 3], [4, 5, 6], [7, 8, 9]], 10).astype(float)
        P = A + 0.03 * rng.random(A.shape)
        P /= P.sum(axis=0, keepdims=True)
        labels = cluster_columns(P, k=3, seed=1)
        truth = np.array([0, 0, 0, 0, 1, 1, 1, 2, 2, 2])
        assert adjusted_rand_index(labels, truth) == 1.0

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(105)
        P = rng.dirichlet(np.ones(3), size=12).T
        a = cluster_columns(P, k=3, seed=42)
        b = cluster_columns(P, k=3, seed=42)
        assert np.array_equal(a, b)

    def test_k_too_large(self):
        with pytest.raises(KTooLarge):
            cluster_columns(np.ones((2, 3)) / 2, k=4)


class TestSubspace:
    def test_row_vector_promoted(self):
        s = Subspace(np.array([1.0, 2.0, 3.0]))
        assert s.basis.shape == (1, 3)

    def test_dim_property(self):
        s = Subspace(np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert s.basis.shape == (2, 2)
