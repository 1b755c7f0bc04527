"""Evaluation metrics: clustering error, completion error, and the two
subspace-error measures (principal angle and Grassmann)."""

import itertools

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import linalg

ORTHO_TOL = 1e-8


def clustering_error(pred, truth):
    """Minimum fraction of mislabeled points over label bijections."""
    pred = np.asarray(pred, dtype=int)
    truth = np.asarray(truth, dtype=int)
    if pred.shape != truth.shape:
        raise ValueError("label vectors must have equal length")
    n = pred.shape[0]
    p_ids, p_inv = np.unique(pred, return_inverse=True)
    t_ids, t_inv = np.unique(truth, return_inverse=True)
    confusion = np.zeros((p_ids.size, t_ids.size), dtype=int)
    np.add.at(confusion, (p_inv, t_inv), 1)
    rows, cols = linear_sum_assignment(-confusion)
    matched = confusion[rows, cols].sum()
    return 1.0 - matched / n


def completion_error(completed, truth):
    """||completed - truth||_F / ||truth||_F."""
    completed = np.asarray(completed, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if completed.shape != truth.shape:
        raise ValueError("shape mismatch")
    denom = np.linalg.norm(truth)
    if denom == 0.0:
        raise ValueError("true matrix is zero")
    return float(np.linalg.norm(completed - truth) / denom)


def _check_orthonormal(B, name):
    B = np.asarray(B, dtype=float)
    if B.ndim != 2:
        raise ValueError(f"{name} must be a matrix")
    gram = B.T @ B
    if np.abs(gram - np.eye(B.shape[1])).max() > ORTHO_TOL:
        raise ValueError(f"{name} does not have orthonormal columns")
    return B


def principal_angle_error(A_basis, B_basis):
    """arcsin of the spectral norm of B - A A'B, clamped to [0, pi/2]."""
    A = _check_orthonormal(A_basis, "A_basis")
    B = _check_orthonormal(B_basis, "B_basis")
    resid = B - A @ (A.T @ B)
    s = np.linalg.norm(resid, 2) if resid.size else 0.0
    return float(np.arcsin(np.clip(s, 0.0, 1.0)))


def principal_angles(A_basis, B_basis):
    """Ascending principal angles from the SVD of A'B."""
    A = _check_orthonormal(A_basis, "A_basis")
    B = _check_orthonormal(B_basis, "B_basis")
    s = linalg.svd(A.T @ B, full_matrices=False).s
    return np.sort(np.arccos(np.clip(s, -1.0, 1.0)))


def grassmann_error(A_basis, B_basis):
    """Dimension-aware subspace distance
    (|k - l| pi^2/4 + sum theta_i^2)^(1/2)."""
    A = _check_orthonormal(A_basis, "A_basis")
    B = _check_orthonormal(B_basis, "B_basis")
    k, l = A.shape[1], B.shape[1]
    theta = principal_angles(A, B)
    return float(np.sqrt(abs(k - l) * np.pi ** 2 / 4.0 +
                         np.sum(theta ** 2)))


_METRICS = {"angle": principal_angle_error, "grassmann": grassmann_error}


def match_subspaces(est_bases, true_bases, metric="grassmann"):
    """Min-total-error bijection between estimated and true subspaces.

    Returns (assignment, mean_error) where assignment[i] is the true-basis
    index matched to est_bases[i]. Exhaustive over permutations (counts <= 8).
    """
    if len(est_bases) != len(true_bases):
        raise ValueError("subspace counts differ")
    L = len(est_bases)
    if L > 8:
        raise ValueError("exhaustive matching supports at most 8 subspaces")
    fn = _METRICS[metric] if isinstance(metric, str) else metric
    cost = np.array([[fn(e, t) for t in true_bases] for e in est_bases])
    best_perm, best_total = None, np.inf
    for perm in itertools.permutations(range(L)):
        total = cost[np.arange(L), perm].sum()
        if total < best_total:
            best_perm, best_total = perm, total
    return list(best_perm), float(best_total / L)
