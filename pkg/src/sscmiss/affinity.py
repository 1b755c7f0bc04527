"""Affinity matrices for the four clustering algorithms, plus spectral
clustering on the symmetrized affinity |C| + |C|'.
"""

import logging
from dataclasses import dataclass

import numpy as np

from . import linalg, solvers

logger = logging.getLogger(__name__)

ZERO_COL_TOL = 1e-12


@dataclass
class Affinity:
    C: np.ndarray  # N x N coefficient matrix, zero diagonal

    @property
    def a_sym(self):
        return np.abs(self.C) + np.abs(self.C).T


def _insert_zero_diag(col, i):
    """Expand a length N-1 coefficient vector to length N with c[i] = 0."""
    out = np.empty(col.shape[0] + 1)
    out[:i] = col[:i]
    out[i] = 0.0
    out[i + 1:] = col[i:]
    return out


def _per_column(X, solve_one):
    """Assemble C column by column; failed solves yield zero columns."""
    N = X.N
    C = np.zeros((N, N))
    others = np.arange(N)
    for i in range(N):
        dictionary_cols = np.delete(others, i)
        try:
            c = solve_one(i, dictionary_cols)
        except solvers.SolverError as exc:
            logger.warning("column %d solve failed: %s", i, exc)
            continue
        C[:, i] = _insert_zero_diag(c, i)
    return Affinity(C=C)


def affinity_ewzf(X):
    """Each zero-filled column as a sparse combination of the others."""
    V = X.values

    def solve_one(i, cols):
        return solvers.basis_pursuit(V[:, cols], V[:, i]).c

    return _per_column(X, solve_one)


def affinity_ewzf_oo(X):
    """As affinity_ewzf but matching only on the represented column's
    observed coordinates (dictionary rows restricted to Omega_i)."""
    V = X.values

    def solve_one(i, cols):
        rows = X.omega(i)
        return solvers.basis_pursuit(V[np.ix_(rows, cols)], V[rows, i]).c

    return _per_column(X, solve_one)


def affinity_ewzf_oo_lasso(X, alpha=7.34, kkt_tol=0.1):
    """LASSO variant of affinity_ewzf_oo with the data-driven lambda rule.

    Only the sparsity pattern matters for the affinity, so the per-column
    solves run at an affinity-grade KKT tolerance (loose absolute threshold
    that still rejects gross solver failures)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    lam = solvers.lasso_lambda_rule(X, alpha)
    V = X.values

    def solve_one(i, cols):
        rows = X.omega(i)
        return solvers.lasso(V[np.ix_(rows, cols)], V[rows, i], lam,
                             kkt_tol=kkt_tol, max_iter=1000)

    return _per_column(X, solve_one)


def default_tsc_q(N_ell):
    """q = round(sqrt(N_l log N_l)), natural log."""
    return int(np.floor(np.sqrt(N_ell * np.log(N_ell)) + 0.5))


def affinity_tsc(X, q):
    """Thresholded correlations: keep the q largest |<x_i, x_j>| per column
    of the normalized zero-filled data."""
    N = X.N
    if not 1 <= q < N:
        raise ValueError("q must satisfy 1 <= q < N")
    V = X.values.copy()
    norms = np.linalg.norm(V, axis=0)
    ok = norms > ZERO_COL_TOL
    if not np.all(ok):
        logger.warning("%d zero-norm columns excluded from TSC affinity",
                       int((~ok).sum()))
    V[:, ok] = V[:, ok] / norms[ok]
    V[:, ~ok] = 0.0
    G = np.abs(V.T @ V)
    np.fill_diagonal(G, 0.0)
    C = np.zeros_like(G)
    for i in range(N):
        top = np.argpartition(G[:, i], -q)[-q:]
        C[top, i] = G[top, i]
    return Affinity(C=C)


def spectral_cluster(aff, L, seed=0, restarts=20):
    """Normalized spectral clustering of the symmetrized affinity.

    Uses L_sym = I - D^{-1/2} A D^{-1/2} with zero-degree rows treated as
    isolated, the L smallest eigenvectors with unit-normalized rows, then
    k-means (deterministic given seed).
    """
    A = aff.a_sym
    N = A.shape[0]
    if L < 1:
        raise ValueError("L must be >= 1")
    if L == 1:
        return np.zeros(N, dtype=int)
    deg = A.sum(axis=1)
    inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(np.maximum(deg, 1e-300)), 0.0)
    lap = np.eye(N) - inv_sqrt[:, None] * A * inv_sqrt[None, :]
    lap = 0.5 * (lap + lap.T)
    _, vectors = linalg.sym_eig(lap)
    emb = vectors[:, :L]
    row_norms = np.linalg.norm(emb, axis=1)
    keep = row_norms > 1e-12
    emb[keep] = emb[keep] / row_norms[keep, None]
    return linalg.kmeans(emb, L, restarts=restarts, seed=seed)


def write_affinity_csv(path, aff):
    np.savetxt(path, aff.C, fmt="%.17g", delimiter=",")


def write_pred_labels_csv(path, labels):
    from .datagen import write_labels_csv

    write_labels_csv(path, labels)
