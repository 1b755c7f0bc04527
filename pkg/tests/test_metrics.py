"""Tests for clustering, completion, and subspace error metrics."""

import numpy as np
import pytest

from sscmiss.metrics import (
    clustering_error,
    completion_error,
    grassmann_error,
    match_subspaces,
    principal_angle_error,
    principal_angles,
)


def _orth(rng, n, d):
    return np.linalg.qr(rng.standard_normal((n, d)))[0]


class TestClusteringError:
    def test_hand_counted(self):
        truth = np.array([0, 0, 0, 1, 1, 1])
        pred = np.array([1, 1, 0, 0, 0, 0])
        # Best bijection: pred 1 -> truth 0, pred 0 -> truth 1. Mislabeled:
        # positions 2 (pred 0 but truth 0) and 3,4 wait - recount directly:
        # with that map, matches are positions 0,1 (1->0 ok), 3,4,5 (0->1 ok),
        # position 2 (pred 0 -> mapped 1, truth 0) wrong. 1/6.
        assert clustering_error(pred, truth) == pytest.approx(1 / 6)

    def test_perfect_and_permuted(self):
        truth = np.array([0, 1, 2, 0, 1, 2])
        assert clustering_error(truth, truth) == 0.0
        relabeled = (truth + 1) % 3
        assert clustering_error(relabeled, truth) == 0.0

    def test_worst_case_all_one_cluster(self):
        truth = np.array([0] * 5 + [1] * 5)
        pred = np.zeros(10, dtype=int)
        assert clustering_error(pred, truth) == pytest.approx(0.5)

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        a = rng.integers(0, 3, size=30)
        b = rng.integers(0, 3, size=30)
        assert clustering_error(a, b) == pytest.approx(clustering_error(b, a))

    def test_unequal_cluster_counts(self):
        truth = np.array([0, 0, 1, 1])
        pred = np.array([0, 1, 2, 3])
        # Two of the four predicted singletons can be matched.
        assert clustering_error(pred, truth) == pytest.approx(0.5)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            clustering_error(np.zeros(3, int), np.zeros(4, int))


class TestCompletionError:
    def test_exact(self):
        truth = np.arange(12.0).reshape(3, 4) + 1
        assert completion_error(truth, truth) == 0.0

    def test_hand_value(self):
        truth = np.eye(2)
        est = np.eye(2) * 2.0
        # ||diff||_F = sqrt(2), ||truth||_F = sqrt(2).
        assert completion_error(est, truth) == pytest.approx(1.0)

    def test_zero_truth_rejected(self):
        with pytest.raises(ValueError):
            completion_error(np.ones((2, 2)), np.zeros((2, 2)))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            completion_error(np.ones((2, 2)), np.ones((2, 3)))


class TestPrincipalAngles:
    def test_identical_subspaces(self):
        rng = np.random.default_rng(0)
        A = _orth(rng, 8, 3)
        assert principal_angle_error(A, A) == pytest.approx(0.0, abs=1e-7)
        assert np.allclose(principal_angles(A, A), 0.0, atol=1e-7)

    def test_basis_invariance(self):
        # Any orthonormal re-basis of the same subspace gives the same
        # angles.
        rng = np.random.default_rng(1)
        A = _orth(rng, 8, 3)
        R = np.linalg.qr(rng.standard_normal((3, 3)))[0]
        B = _orth(rng, 8, 3)
        assert principal_angle_error(A @ R, B) == pytest.approx(
            principal_angle_error(A, B), abs=1e-10)

    def test_rotation_covariance(self):
        rng = np.random.default_rng(2)
        A = _orth(rng, 8, 3)
        B = _orth(rng, 8, 3)
        Q = np.linalg.qr(rng.standard_normal((8, 8)))[0]
        assert principal_angle_error(Q @ A, Q @ B) == pytest.approx(
            principal_angle_error(A, B), abs=1e-10)

    def test_orthogonal_subspaces(self):
        A = np.eye(6)[:, :2]
        B = np.eye(6)[:, 2:4]
        assert principal_angle_error(A, B) == pytest.approx(np.pi / 2)
        assert np.allclose(principal_angles(A, B), np.pi / 2)

    def test_known_plane_angle(self):
        t = 0.3
        A = np.array([[1.0], [0.0]])
        B = np.array([[np.cos(t)], [np.sin(t)]])
        assert principal_angle_error(A, B) == pytest.approx(t, abs=1e-12)

    def test_non_orthonormal_rejected(self):
        with pytest.raises(ValueError):
            principal_angle_error(np.ones((4, 2)), np.eye(4)[:, :2])


class TestGrassmannError:
    def test_equal_dims_is_angle_rms(self):
        rng = np.random.default_rng(3)
        A = _orth(rng, 8, 3)
        B = _orth(rng, 8, 3)
        theta = principal_angles(A, B)
        assert grassmann_error(A, B) == pytest.approx(
            np.sqrt(np.sum(theta ** 2)), abs=1e-12)

    def test_dimension_mismatch_penalty(self):
        rng = np.random.default_rng(4)
        A = _orth(rng, 8, 3)
        B = A[:, :2]
        # Nested subspaces: angles vanish, penalty term pi^2/4 per missing
        # dimension remains.
        assert grassmann_error(A, B) == pytest.approx(np.pi / 2, abs=1e-6)

    def test_zero_for_same_subspace(self):
        rng = np.random.default_rng(5)
        A = _orth(rng, 10, 4)
        R = np.linalg.qr(rng.standard_normal((4, 4)))[0]
        assert grassmann_error(A, A @ R) == pytest.approx(0.0, abs=1e-6)


class TestMatchSubspaces:
    def test_recovers_permutation(self):
        rng = np.random.default_rng(6)
        true = [_orth(rng, 10, 2) for _ in range(3)]
        est = [true[2], true[0], true[1]]
        assign, mean_err = match_subspaces(est, true)
        assert assign == [2, 0, 1]
        assert mean_err == pytest.approx(0.0, abs=1e-6)

    def test_mean_error_value(self):
        rng = np.random.default_rng(7)
        true = [_orth(rng, 10, 2) for _ in range(2)]
        est = [true[0], _orth(rng, 10, 2)]
        assign, mean_err = match_subspaces(est, true, metric="grassmann")
        direct = grassmann_error(est[1], true[1])
        assert assign == [0, 1]
        # The self-matched term contributes arccos rounding noise ~1e-8.
        assert mean_err == pytest.approx(direct / 2, abs=1e-6)

    def test_angle_metric(self):
        rng = np.random.default_rng(8)
        true = [_orth(rng, 8, 2) for _ in range(2)]
        assign, mean_err = match_subspaces(true, true, metric="angle")
        assert assign == [0, 1]
        assert mean_err == pytest.approx(0.0, abs=1e-7)

    def test_count_mismatch(self):
        rng = np.random.default_rng(9)
        with pytest.raises(ValueError):
            match_subspaces([_orth(rng, 6, 2)], [_orth(rng, 6, 2)] * 2)
