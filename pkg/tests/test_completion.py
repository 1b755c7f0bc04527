"""Tests for SVT matrix completion and subspace identification."""

import numpy as np
import pytest

from sscmiss import completion
from sscmiss.completion import (
    CompletionResult,
    Diverged,
    complete_by_cluster,
    identify_subspace,
    svt_complete,
)
from sscmiss.datagen import ObservedMatrix, SamplingSpec, generate_model, sample


def _planted_low_rank(rng, rows, cols, rank, p):
    truth = rng.standard_normal((rows, rank)) @ rng.standard_normal((rank, cols))
    mask = rng.random((rows, cols)) < p
    values = np.where(mask, truth, 0.0)
    return truth, values, mask


class TestSvtComplete:
    def test_recovers_planted_low_rank(self):
        rng = np.random.default_rng(0)
        truth, values, mask = _planted_low_rank(rng, 40, 60, 2, 0.7)
        M, it, ok, rank = svt_complete(values, mask)
        assert ok
        rel = np.linalg.norm(M - truth) / np.linalg.norm(truth)
        assert rel < 1e-3
        assert rank == 2

    def test_full_mask_shortcut(self):
        rng = np.random.default_rng(1)
        truth = rng.standard_normal((10, 8))
        M, it, ok, rank = svt_complete(truth, np.ones_like(truth, bool))
        assert it == 0 and ok
        assert np.array_equal(M, truth)
        assert rank == np.linalg.matrix_rank(truth)

    def test_zero_observed_values(self):
        mask = np.zeros((5, 5), bool)
        mask[0, 0] = True
        M, it, ok, rank = svt_complete(np.zeros((5, 5)), mask)
        assert ok and rank == 0
        assert np.all(M == 0.0)

    def test_empty_mask_rejected(self):
        with pytest.raises(ValueError):
            svt_complete(np.ones((4, 4)), np.zeros((4, 4), bool))

    def test_observed_entries_fit(self):
        rng = np.random.default_rng(2)
        truth, values, mask = _planted_low_rank(rng, 30, 40, 2, 0.8)
        M, it, ok, rank = svt_complete(values, mask, conv_tol=1e-5)
        resid = np.linalg.norm((values - M)[mask]) / np.linalg.norm(values[mask])
        assert resid <= 1e-5

    def test_nonconvergence_reported(self):
        rng = np.random.default_rng(3)
        truth, values, mask = _planted_low_rank(rng, 30, 40, 3, 0.3)
        M, it, ok, rank = svt_complete(values, mask, max_iter=3)
        assert not ok and it == 3

    def test_divergence_raises(self):
        rng = np.random.default_rng(4)
        truth, values, mask = _planted_low_rank(rng, 20, 20, 2, 0.5)
        # An absurdly large step size blows up the iterates.
        with pytest.raises(Diverged):
            svt_complete(values, mask, delta=1e6, max_iter=200)


class TestCompleteByCluster:
    def _instance(self, seed, p):
        model = generate_model(30, 2, 2, 40, mode="gaussian", seed=seed)
        X = sample(model, SamplingSpec("per-column-random", p, seed=seed + 1))
        return model, X

    def test_per_cluster_recovery(self):
        model, X = self._instance(0, 0.85)
        res = complete_by_cluster(X, model.labels)
        assert isinstance(res, CompletionResult)
        assert all(res.converged)
        rel = np.linalg.norm(res.completed - model.data()) / np.linalg.norm(model.data())
        assert rel < 1e-3
        assert res.per_cluster_rank == [2, 2]

    def test_wrong_labels_hurt(self):
        # Mixing clusters raises the rank and the completion error.
        model, X = self._instance(1, 0.85)
        good = complete_by_cluster(X, model.labels)
        rng = np.random.default_rng(2)
        bad_labels = rng.integers(0, 2, size=X.N)
        bad = complete_by_cluster(X, bad_labels)
        err_good = np.linalg.norm(good.completed - model.data())
        err_bad = np.linalg.norm(bad.completed - model.data())
        assert err_good < err_bad

    def test_label_length_mismatch(self):
        model, X = self._instance(3, 0.8)
        with pytest.raises(ValueError):
            complete_by_cluster(X, np.zeros(3, dtype=int))

    def test_diverged_cluster_flagged_and_zero_filled(self):
        model, X = self._instance(4, 0.6)
        res = complete_by_cluster(X, model.labels, delta=1e6, max_iter=200)
        assert not any(res.converged)
        # Fallback keeps the zero-filled observations.
        assert np.array_equal(res.completed, X.values)
        assert res.per_cluster_rank == [0, 0]

    def test_non_contiguous_labels(self):
        model, X = self._instance(5, 0.8)
        shifted = model.labels * 5 + 3
        res = complete_by_cluster(X, shifted)
        assert len(res.per_cluster_rank) == 2


class TestIdentifySubspace:
    def test_exact_rank(self):
        rng = np.random.default_rng(0)
        U = np.linalg.qr(rng.standard_normal((20, 3)))[0]
        cluster = U @ rng.standard_normal((3, 15))
        B = identify_subspace(cluster)
        assert B.shape == (20, 3)
        # Span matches: projection residual of U onto B vanishes.
        assert np.linalg.norm(U - B @ (B.T @ U)) < 1e-8

    def test_orthonormal_output(self):
        rng = np.random.default_rng(1)
        cluster = rng.standard_normal((10, 4))
        B = identify_subspace(cluster)
        assert np.allclose(B.T @ B, np.eye(B.shape[1]), atol=1e-10)

    def test_d_tol_extreme(self):
        rng = np.random.default_rng(2)
        cluster = rng.standard_normal((10, 6))
        B = identify_subspace(cluster, d_tol=1.0)
        assert B.shape[1] == 1

    def test_zero_matrix_rejected(self):
        with pytest.raises(ValueError):
            identify_subspace(np.zeros((5, 5)))


class TestCompletedCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        M = rng.standard_normal((6, 7))
        path = tmp_path / "done.csv"
        completion.write_completed_csv(path, M)
        assert np.array_equal(np.loadtxt(path, delimiter=","), M)
