"""Union-of-subspaces data generation and observation masks.

Data model: X^(l) = U^(l) A^(l) with orthonormal-column bases U^(l). Two
generative recipes are supported: coefficient columns uniform on the unit
sphere ("sphere"), and the product of two standard Gaussian matrices
("gaussian", SVD-canonicalized so the stored U/A stay orthonormal/consistent).

Missing data is represented by a boolean mask; values are kept zero-filled
at unobserved entries, so the mask is authoritative.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from . import linalg


def _rng(seed):
    # counter-based generator so per-trial streams never overlap
    return np.random.Generator(np.random.Philox(key=seed))


def round_half_away(x):
    """Round half away from zero (the rounding used for |Omega| = round(p*n))."""
    return int(np.floor(x + 0.5)) if x >= 0 else -int(np.floor(-x + 0.5))


@dataclass
class UoSModel:
    n: int
    dims: list
    bases: list            # per-subspace n x d_l orthonormal-column matrices
    coeffs: list            # per-subspace d_l x N_l coefficient matrices
    labels: np.ndarray       # true label per column, length N

    @property
    def L(self):
        return len(self.bases)

    @property
    def N(self):
        return len(self.labels)

    def data(self):
        """Full n x N data matrix in column (label) order."""
        X = np.zeros((self.n, self.N))
        for ell in range(self.L):
            X[:, self.labels == ell] = self.bases[ell] @ self.coeffs[ell]
        return X

    def cluster_columns(self, ell):
        """Global column indices belonging to subspace ell."""
        return np.flatnonzero(self.labels == ell)


@dataclass
class ObservedMatrix:
    values: np.ndarray       # n x N, zero-filled at unobserved entries
    mask: np.ndarray          # boolean n x N

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def N(self):
        return self.values.shape[1]

    def omega(self, i):
        """Observed row indices of column i."""
        return np.flatnonzero(self.mask[:, i])

    def is_same_location(self):
        return bool(np.all(self.mask == self.mask[:, :1]))


@dataclass
class SamplingSpec:
    pattern: str             # "same-location" | "per-column-random"
    p: float
    seed: int = 0
    # same-location masks default to the first round(p*n) coordinates; this
    # flag switches to a seed-driven common random subset instead
    same_location_random: bool = False

    def __post_init__(self):
        if self.pattern not in ("same-location", "per-column-random"):
            raise ValueError(f"unknown sampling pattern: {self.pattern}")
        if not 0.0 < self.p <= 1.0:
            raise ValueError("sampling ratio p must be in (0, 1]")


def generate_model(n, L, dims, N_per, mode="sphere", seed=0):
    """Generate a union-of-subspaces model.

    mode "sphere": U^(l) from QR of a Gaussian matrix, coefficient columns
    uniform on the unit sphere. mode "gaussian": X^(l) is the product of two
    standard Gaussian matrices; U^(l)/A^(l) are recovered by SVD so the model
    record stays canonical while X^(l) equals the raw product.
    """
    if isinstance(dims, int):
        dims = [dims] * L
    if isinstance(N_per, int):
        N_per = [N_per] * L
    dims, N_per = list(dims), list(N_per)
    if len(dims) != L or len(N_per) != L:
        raise ValueError("dims and N_per must have length L")
    if any(d > n or d < 1 for d in dims):
        raise ValueError("subspace dimensions must lie in [1, n]")
    if any(m < 1 for m in N_per):
        raise ValueError("need at least one point per subspace")
    rng = _rng(seed)
    bases, coeffs, labels = [], [], []
    for ell in range(L):
        d, m = dims[ell], N_per[ell]
        if mode == "sphere":
            q, _ = np.linalg.qr(rng.standard_normal((n, d)))
            a = rng.standard_normal((d, m))
            a /= np.linalg.norm(a, axis=0)
        elif mode == "gaussian":
            x = rng.standard_normal((n, d)) @ rng.standard_normal((d, m))
            res = linalg.svd(x, full_matrices=False)
            q = res.u[:, :d]
            a = res.s[:d, None] * res.vt[:d]
        else:
            raise ValueError(f"unknown generation mode: {mode}")
        bases.append(q)
        coeffs.append(a)
        labels.extend([ell] * m)
    return UoSModel(n=n, dims=dims, bases=bases, coeffs=coeffs,
                    labels=np.array(labels, dtype=int))


def sample_matrix(X, spec):
    """Apply an observation pattern to a raw n x N matrix."""
    X = np.asarray(X, dtype=float)
    n, N = X.shape
    size = round_half_away(spec.p * n)
    if size < 1:
        raise ValueError("round(p*n) must be at least 1")
    mask = np.zeros((n, N), dtype=bool)
    if spec.pattern == "same-location":
        if spec.same_location_random:
            rows = _rng(spec.seed).choice(n, size=size, replace=False)
        else:
            rows = np.arange(size)
        mask[rows, :] = True
    else:
        rng = _rng(spec.seed)
        for i in range(N):
            rows = rng.choice(n, size=size, replace=False)
            mask[rows, i] = True
    return ObservedMatrix(values=np.where(mask, X, 0.0), mask=mask)


def sample(model, spec):
    """Observe a UoSModel under the given sampling pattern."""
    return sample_matrix(model.data(), spec)


def normalize_observed(X):
    """Scale every zero-filled column to unit 2-norm (zero columns kept).

    Columns with little observed energy otherwise carry negligible weight in
    the l1 programs and end up isolated in the affinity graph; normalizing
    the observed vectors puts all dictionary columns on an equal footing.
    """
    norms = np.linalg.norm(X.values, axis=0)
    scale = np.where(norms > 0, norms, 1.0)
    return ObservedMatrix(values=X.values / scale, mask=X.mask.copy())


def truncated_basis_svd(model, omega_i, ell):
    """SVD factors (Q, Sigma, R) of the truncated basis I_Omega U^(l).

    Q is n x n orthogonal, Sigma is n x d with the singular values on the
    leading diagonal, R is d x d; Q @ Sigma @ R.T reconstructs I_Omega U^(l).
    """
    omega_i = np.asarray(omega_i, dtype=int)
    if omega_i.size < 1:
        raise ValueError("need at least one observed coordinate")
    u = model.bases[ell]
    v = np.zeros_like(u)
    v[omega_i] = u[omega_i]
    res = linalg.svd(v, full_matrices=True)
    d = u.shape[1]
    sigma = np.zeros((model.n, d))
    np.fill_diagonal(sigma, res.s)
    return res.u, sigma, res.vt.T


# --- CSV interfaces (missing entries stored as 0; the mask is authoritative)

def write_data_csv(path, values):
    np.savetxt(path, values, fmt="%.17g", delimiter=",")


def read_data_csv(path):
    return np.atleast_2d(np.loadtxt(path, delimiter=","))


def write_mask_csv(path, mask):
    np.savetxt(path, mask.astype(int), fmt="%d", delimiter=",")


def read_mask_csv(path):
    return np.atleast_2d(np.loadtxt(path, delimiter=",")).astype(bool)


def write_labels_csv(path, labels):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for lab in labels:
            writer.writerow([int(lab)])


def read_labels_csv(path):
    with open(path, newline="") as fh:
        return np.array([int(row[0]) for row in csv.reader(fh) if row], dtype=int)
