"""L1 optimization engines.

basis_pursuit solves min ||c||_1 s.t. Ac = b as the split LP
min 1'(c+ + c-) s.t. A(c+ - c-) = b, c+- >= 0, and recovers the equality
multiplier as the dual vector nu (max <b, nu> s.t. ||A' nu||_inf <= 1).
dual_direction solves the certificate LP max <a, lam> s.t. ||A' lam||_inf <= 1.
lasso minimizes 0.5 ||b - Ac||^2 + lambda ||c||_1.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

FEAS_TOL = 1e-8
GAP_TOL = 1e-8
SUPPORT_TOL_FACTOR = 1e-6


class SolverError(RuntimeError):
    pass


class Infeasible(SolverError):
    pass


class NotConverged(SolverError):
    pass


class Unbounded(SolverError):
    pass


@dataclass
class SparseSolution:
    c: np.ndarray
    nu: np.ndarray
    primal_obj: float
    dual_obj: float
    gap: float
    support: np.ndarray


@dataclass
class SolveStats:
    """Running extremes over all basis-pursuit solves (used by the
    acceptance suite to certify every solve in a sweep)."""
    count: int = 0
    max_gap: float = 0.0           # gap normalized by max(1, ||c||_1)
    max_sign_resid: float = 0.0    # max |A_S' nu - sign(c_S)| over supports
    max_dual_infeas: float = 0.0   # max(||A' nu||_inf - 1, 0)

    def reset(self):
        self.count = 0
        self.max_gap = 0.0
        self.max_sign_resid = 0.0
        self.max_dual_infeas = 0.0


solve_stats = SolveStats()


def support_of(c, tol_factor=SUPPORT_TOL_FACTOR):
    """Indices with |c_j| > tol_factor * max|c|."""
    c = np.asarray(c)
    peak = np.abs(c).max() if c.size else 0.0
    return np.flatnonzero(np.abs(c) > tol_factor * peak)


def basis_pursuit(A, b, feas_tol=FEAS_TOL, gap_tol=GAP_TOL):
    """Equality-constrained basis pursuit with dual recovery.

    Raises Infeasible when b is not in the column span of A, NotConverged on
    iteration failure. On success the duality gap is <= gap_tol * max(1,
    ||c||_1) and A_S' nu = sign(c_S) on the support.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    m, k = A.shape
    if b.shape[0] != m:
        raise ValueError("shape mismatch between A and b")
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        sol = SparseSolution(np.zeros(k), np.zeros(m), 0.0, 0.0, 0.0,
                             np.array([], dtype=int))
        _record(sol, A)
        return sol
    cost = np.ones(2 * k)
    split = np.hstack([A, -A])
    failure = None
    # dual simplex first (basic solutions, exact duals); interior point with
    # crossover as a rescue when the simplex vertex is numerically degenerate
    for method, presolve in (("highs-ds", False), ("highs-ipm", True)):
        res = linprog(cost, A_eq=split, b_eq=b, bounds=(0, None),
                      method=method, options={"presolve": presolve})
        if res.status == 2:
            raise Infeasible("basis_pursuit: b not in the column span of A")
        if res.status != 0:
            failure = NotConverged(f"basis_pursuit: LP failed (status "
                                   f"{res.status}: {res.message})")
            continue
        c = res.x[:k] - res.x[k:]
        nu = np.asarray(res.eqlin.marginals, dtype=float)
        resid = np.linalg.norm(A @ c - b)
        if resid > feas_tol * max(1.0, bnorm):
            failure = NotConverged(f"basis_pursuit: residual {resid:.3e} "
                                   f"exceeds tolerance")
            continue
        primal = float(np.abs(c).sum())
        dual = float(b @ nu)
        gap = abs(primal - dual)
        if gap > gap_tol * max(1.0, primal):
            failure = NotConverged(f"basis_pursuit: duality gap {gap:.3e} "
                                   f"too large")
            continue
        sol = SparseSolution(c, nu, primal, dual, gap, support_of(c))
        _record(sol, A)
        return sol
    raise failure


def _record(sol, A):
    st = solve_stats
    st.count += 1
    st.max_gap = max(st.max_gap, sol.gap / max(1.0, sol.primal_obj))
    corr = A.T @ sol.nu
    st.max_dual_infeas = max(st.max_dual_infeas,
                             float(np.abs(corr).max(initial=0.0)) - 1.0)
    if sol.support.size:
        resid = corr[sol.support] - np.sign(sol.c[sol.support])
        st.max_sign_resid = max(st.max_sign_resid, float(np.abs(resid).max()))


def dual_direction(a_tilde, A_tilde, tol=1e-8):
    """Maximizer of <a, lam> subject to ||A' lam||_inf <= 1.

    Raises Unbounded when the constraint polyhedron has a recession direction
    aligned with a_tilde.
    """
    a = np.asarray(a_tilde, dtype=float).ravel()
    At = np.asarray(A_tilde, dtype=float)
    if At.size == 0 or not np.any(At):
        raise ValueError("dual_direction: A_tilde must be nonzero")
    m = a.shape[0]
    gt = At.T
    res = linprog(-a, A_ub=np.vstack([gt, -gt]),
                  b_ub=np.ones(2 * gt.shape[0]), bounds=(None, None),
                  method="highs-ds", options={"presolve": False})
    if res.status == 3:
        raise Unbounded("dual_direction: objective unbounded over the polar")
    if res.status != 0:
        raise NotConverged(f"dual_direction: LP failed (status {res.status})")
    lam = res.x
    if np.abs(At.T @ lam).max() > 1.0 + 1e-9:
        raise NotConverged("dual_direction: returned point infeasible")
    return lam


def _lasso_kkt_residual(A, b, lam, c, support_tol=SUPPORT_TOL_FACTOR):
    g = A.T @ (A @ c - b)
    peak = np.abs(c).max() if c.size else 0.0
    on = np.abs(c) > support_tol * peak if peak > 0 else np.zeros_like(c, bool)
    resid = np.maximum(np.abs(g) - lam, 0.0)          # off-support condition
    resid[on] = np.abs(g[on] + lam * np.sign(c[on]))  # stationarity on support
    return float(resid.max(initial=0.0))


def _lasso_cd(A, b, lam, c, max_iter, kkt_tol):
    """Plain coordinate descent used to polish or stand alone."""
    col_sq = np.einsum("ij,ij->j", A, A)
    r = b - A @ c
    for _ in range(max_iter):
        for j in range(A.shape[1]):
            if col_sq[j] == 0.0:
                continue
            old = c[j]
            rho = A[:, j] @ r + col_sq[j] * old
            new = np.sign(rho) * max(abs(rho) - lam, 0.0) / col_sq[j]
            if new != old:
                r += A[:, j] * (old - new)
                c[j] = new
        if _lasso_kkt_residual(A, b, lam, c) <= kkt_tol:
            return c
    raise NotConverged("lasso: coordinate descent hit the iteration cap")


def lasso(A, b, lam, kkt_tol=1e-8, max_iter=5000):
    """Minimize 0.5 ||b - Ac||^2 + lam ||c||_1.

    A fast coordinate-descent solve (scikit-learn) is verified against the
    KKT subgradient conditions (absolute residual <= kkt_tol) and polished
    by plain coordinate descent if needed. kkt_tol is an absolute threshold;
    callers that only need the sparsity pattern (affinity construction) can
    pass a loose value to trade accuracy for speed.
    """
    import warnings

    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    if lam <= 0:
        raise ValueError("lasso: lambda must be positive")
    k = A.shape[1]
    if np.abs(A.T @ b).max(initial=0.0) <= lam:
        return np.zeros(k)  # shrinkage-to-zero threshold
    from sklearn.exceptions import ConvergenceWarning
    from sklearn.linear_model import Lasso

    est = Lasso(alpha=lam / A.shape[0], fit_intercept=False,
                tol=min(1e-4, kkt_tol), max_iter=max_iter)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        est.fit(A, b)
    c = est.coef_.astype(float).copy()
    if _lasso_kkt_residual(A, b, lam, c) > kkt_tol:
        c = _lasso_cd(A, b, lam, c, max_iter, kkt_tol)
    return c


def lasso_lambda_rule(X_observed, alpha=7.34):
    """lambda = alpha / max_{i != j} |x_i' x_j| over zero-filled columns."""
    V = X_observed.values
    if V.shape[1] < 2:
        raise ValueError("lambda rule needs at least two columns")
    gram = np.abs(V.T @ V)
    np.fill_diagonal(gram, 0.0)
    peak = gram.max()
    if peak == 0.0:
        raise ValueError("lambda rule: all cross-products are zero")
    return alpha / peak
