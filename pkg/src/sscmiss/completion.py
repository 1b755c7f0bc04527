"""Per-cluster matrix completion via singular value thresholding (SVT)."""

import logging
from dataclasses import dataclass

import numpy as np

from . import linalg

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 500
DEFAULT_CONV_TOL = 1e-4


class Diverged(RuntimeError):
    pass


@dataclass
class CompletionResult:
    completed: np.ndarray
    per_cluster_rank: list
    iterations: list
    converged: list


def _shrink(Y, tau):
    res = linalg.svd(Y, full_matrices=False)
    s = np.maximum(res.s - tau, 0.0)
    rank = int(np.sum(s > 0))
    return (res.u[:, :rank] * s[:rank]) @ res.vt[:rank], rank


def svt_complete(values, mask, tau=None, delta=None,
                 max_iter=DEFAULT_MAX_ITER, conv_tol=DEFAULT_CONV_TOL):
    """Standard SVT iteration: soft-threshold the singular values by tau and
    take gradient steps of size delta on the observed residual.

    Defaults: tau = 5 sqrt(rows * cols), delta = 1.2 / observed fraction.
    Returns (completed, iterations, converged, rank).
    """
    values = np.asarray(values, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    n_obs = int(mask.sum())
    if n_obs < 1:
        raise ValueError("svt_complete: mask has no observed entries")
    if mask.all():
        rank = int(np.linalg.matrix_rank(values)) if np.any(values) else 0
        return values.copy(), 0, True, rank
    obs_norm = np.linalg.norm(values[mask])
    if obs_norm == 0.0:
        return np.zeros_like(values), 0, True, 0
    if tau is None:
        tau = 5.0 * np.sqrt(values.shape[0] * values.shape[1])
    if delta is None:
        delta = 1.2 * values.size / n_obs
    Y = np.zeros_like(values)
    M = np.zeros_like(values)
    rank = 0
    for it in range(1, max_iter + 1):
        M, rank = _shrink(Y, tau)
        resid = values[mask] - M[mask]
        rel = np.linalg.norm(resid) / obs_norm
        if rel <= conv_tol:
            return M, it, True, rank
        if rel > 1e3:
            raise Diverged(f"svt_complete: residual blew up at iteration "
                           f"{it} (relative {rel:.3e})")
        Y[mask] += delta * resid
    return M, max_iter, False, rank


def complete_by_cluster(X, labels, tau=None, delta=None,
                        max_iter=DEFAULT_MAX_ITER, conv_tol=DEFAULT_CONV_TOL):
    """SVT applied independently to each label's column submatrix;
    diverged clusters are left zero-filled and flagged."""
    labels = np.asarray(labels, dtype=int)
    if labels.shape[0] != X.N:
        raise ValueError("labels length must match column count")
    completed = np.zeros_like(X.values)
    ranks, iters, conv = [], [], []
    for lab in np.unique(labels):
        cols = np.flatnonzero(labels == lab)
        try:
            sub, it, ok, rank = svt_complete(
                X.values[:, cols], X.mask[:, cols], tau=tau, delta=delta,
                max_iter=max_iter, conv_tol=conv_tol)
        except Diverged as exc:
            logger.warning("cluster %d completion diverged: %s", lab, exc)
            sub = X.values[:, cols].copy()
            it, ok, rank = 0, False, 0
        completed[:, cols] = sub
        ranks.append(rank)
        iters.append(it)
        conv.append(ok)
    return CompletionResult(completed=completed, per_cluster_rank=ranks,
                            iterations=iters, converged=conv)


def identify_subspace(cluster_matrix, d_tol=1e-6):
    """Orthonormal basis of a (completed) cluster: left singular vectors
    with singular value > d_tol * max(s)."""
    cluster_matrix = np.asarray(cluster_matrix, dtype=float)
    if cluster_matrix.size == 0 or not np.any(cluster_matrix):
        raise ValueError("identify_subspace: zero or empty matrix")
    res = linalg.svd(cluster_matrix, full_matrices=False)
    rank = max(1, int(np.sum(res.s > d_tol * res.s[0])))
    return res.u[:, :rank]


def write_completed_csv(path, completed):
    np.savetxt(path, completed, fmt="%.17g", delimiter=",")
