"""Dense linear-algebra kernel: SVD, symmetric eig, pseudo-inverse, k-means.

All functions are pure and deterministic for identical inputs. Matrices are
plain float64 ndarrays; no sparse storage.
"""

from dataclasses import dataclass

import numpy as np


class SvdError(RuntimeError):
    """SVD iteration failed to converge."""


@dataclass(frozen=True)
class SvdResult:
    u: np.ndarray
    s: np.ndarray
    vt: np.ndarray


def svd(m, full_matrices=True):
    """Full SVD with singular values sorted nonincreasing.

    Raises SvdError if the underlying iteration does not converge.
    """
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise ValueError("svd: input has non-finite entries")
    try:
        u, s, vt = np.linalg.svd(m, full_matrices=full_matrices)
    except np.linalg.LinAlgError as exc:
        raise SvdError(f"svd did not converge: {exc}") from exc
    return SvdResult(u, s, vt)


def pinv(m, tol=None):
    """Moore-Penrose pseudo-inverse via SVD.

    Singular values <= tol * max(s) are truncated. Default tol is
    1e-10 * max(m.shape).
    """
    m = np.asarray(m, dtype=float)
    if tol is None:
        tol = 1e-10 * max(m.shape)
    if tol < 0:
        raise ValueError("pinv: tol must be nonnegative")
    res = svd(m, full_matrices=False)
    s = res.s
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((m.shape[1], m.shape[0]))
    keep = s > tol * s[0]
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (res.vt.T * inv) @ res.u.T


def sym_eig(m, sym_tol=1e-10):
    """Eigendecomposition of a symmetric matrix; values ascending.

    Rejects input that is not symmetric within sym_tol (relative to its
    largest entry).
    """
    m = np.asarray(m, dtype=float)
    scale = max(1.0, np.abs(m).max()) if m.size else 1.0
    if np.abs(m - m.T).max() > sym_tol * scale:
        raise ValueError("sym_eig: input is not symmetric")
    values, vectors = np.linalg.eigh(m)
    return values, vectors


def _kmeans_pp_init(points, k, rng):
    """k-means++ seeding."""
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    idx = rng.integers(n)
    centers[0] = points[idx]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d2 / total)
        centers[j] = points[idx]
        d2 = np.minimum(d2, np.sum((points - centers[j]) ** 2, axis=1))
    return centers


def _kmeans_once(points, k, rng, max_iter):
    centers = _kmeans_pp_init(points, k, rng)
    labels = np.zeros(points.shape[0], dtype=int)
    for _ in range(max_iter):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        for j in range(k):
            members = points[new_labels == j]
            if len(members) == 0:
                # empty cluster: re-seed from the farthest point
                far = d2.min(axis=1).argmax()
                centers[j] = points[far]
                new_labels[far] = j
            else:
                centers[j] = members.mean(axis=0)
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    inertia = d2[np.arange(points.shape[0]), labels].sum()
    return labels, inertia


def kmeans(points, k, restarts=20, seed=0, max_iter=300):
    """Best-of-restarts k-means with k-means++ seeding.

    Deterministic given seed; returns integer labels in [0, k).
    """
    points = np.asarray(points, dtype=float)
    if k < 1:
        raise ValueError("kmeans: k must be >= 1")
    if points.shape[0] < k:
        raise ValueError("kmeans: need at least k points")
    if k == 1:
        return np.zeros(points.shape[0], dtype=int)
    rng = np.random.Generator(np.random.Philox(key=seed))
    best_labels, best_inertia = None, np.inf
    for _ in range(restarts):
        labels, inertia = _kmeans_once(points, k, rng, max_iter)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return best_labels
