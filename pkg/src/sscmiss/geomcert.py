"""Centro-symmetric polytope geometry and success-condition checkers.

P(G) = conv(+-g_1, ..., +-g_k). The polar of P(G) is {z : ||G'z||_inf <= 1}
and inradius(P) * circumradius(polar) = 1, which is how the inradius is
computed. When the generators span only a subspace, all checker quantities
(dual direction, inradius) are evaluated inside that span after an
orthonormal change of basis; in the ambient metric the inradius would be
trivially zero.
"""

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg, solvers
from .datagen import truncated_basis_svd
from .solvers import Unbounded

EXACT_MAX_DIM = 6
EXACT_MAX_GENERATORS = 14
SAMPLING_DIRECTIONS = 2000
RANK_TOL = 1e-10


class AssumptionViolated(RuntimeError):
    """A theorem hypothesis (e.g. invertibility of the restricted basis)
    does not hold on this instance."""


@dataclass(frozen=True)
class Polytope:
    generators: np.ndarray  # m x k; columns +-p_j generate the polytope


@dataclass(frozen=True)
class RadiusEstimate:
    lower: float
    upper: float
    exact: bool
    span_deficient: bool = False


@dataclass
class CertificateReport:
    subject: tuple                 # (ell, i)
    entries: list                  # (k, j, lhs) per competitor
    inradius: RadiusEstimate
    holds: bool
    margin: float
    lam: np.ndarray = None         # dual direction used for the LHS

    @property
    def max_lhs(self):
        return max((e[2] for e in self.entries), default=0.0)


def _rank_and_basis(G):
    res = linalg.svd(G, full_matrices=False)
    if res.s.size == 0 or res.s[0] == 0.0:
        return 0, np.zeros((G.shape[0], 0))
    rank = int(np.sum(res.s > RANK_TOL * res.s[0]))
    return rank, res.u[:, :rank]


def _polar_vertices_max_norm(G, feas_tol=1e-9):
    """Exact circumradius of {z : ||G'z||_inf <= 1} by vertex enumeration.

    Every vertex has m linearly independent active constraints +-g_j'z = 1;
    enumerate all m-subsets of generators with all sign patterns (first sign
    fixed by central symmetry).
    """
    m, k = G.shape
    gt = G.T  # k x m, rows are constraint normals
    best = 0.0
    combos = np.array(list(itertools.combinations(range(k), m)))
    subs = gt[combos]  # (ncomb, m, m)
    dets = np.abs(np.linalg.det(subs))
    scale = np.maximum(np.prod(np.linalg.norm(subs, axis=2), axis=1), 1e-300)
    ok = dets > 1e-12 * scale
    subs = subs[ok]
    if subs.shape[0] == 0:
        return 0.0
    for signs in itertools.product((1.0, -1.0), repeat=m - 1):
        rhs = np.array((1.0,) + signs)
        rhs_col = np.broadcast_to(rhs[:, None], (subs.shape[0], m, 1)).copy()
        z = np.linalg.solve(subs, rhs_col)[..., 0]
        feas = np.abs(z @ G).max(axis=1) <= 1.0 + feas_tol
        if np.any(feas):
            best = max(best, float(np.linalg.norm(z[feas], axis=1).max()))
    return best


def _polar_sampled_max_norm(G, n_directions, seed):
    """Lower bound on the polar circumradius from LP solves in random
    directions (each solve lands on a vertex)."""
    m = G.shape[0]
    rng = np.random.Generator(np.random.Philox(key=seed))
    best = 0.0
    dirs = rng.standard_normal((n_directions, m))
    norms = np.linalg.norm(dirs, axis=1)
    dirs = dirs[norms > 0] / norms[norms > 0, None]
    for d in dirs:
        lam = solvers.dual_direction(d, G)
        best = max(best, float(np.linalg.norm(lam)))
    return best


def circumradius_polar(P, n_directions=SAMPLING_DIRECTIONS, seed=0):
    """Circumradius of the polar set of P.

    Exact (vertex enumeration) when the ambient dimension is at most
    EXACT_MAX_DIM and there are at most EXACT_MAX_GENERATORS generators;
    otherwise a sampled lower bound with upper = +inf.
    """
    G = np.asarray(P.generators, dtype=float)
    m, k = G.shape
    rank, _ = _rank_and_basis(G)
    if rank < m:
        raise Unbounded("polar set has a recession direction "
                        "(generators do not span the ambient space)")
    if m <= EXACT_MAX_DIM and k <= EXACT_MAX_GENERATORS:
        r = _polar_vertices_max_norm(G)
        return RadiusEstimate(lower=r, upper=r, exact=True)
    r = _polar_sampled_max_norm(G, n_directions, seed)
    return RadiusEstimate(lower=r, upper=np.inf, exact=False)


def inradius(P, n_directions=SAMPLING_DIRECTIONS, seed=0):
    """Inradius of P via r(P) = 1 / R(polar(P)).

    Span-deficient generators give exact 0 (ambient metric); use
    inradius_in_span for the restricted reading.
    """
    G = np.asarray(P.generators, dtype=float)
    rank, _ = _rank_and_basis(G)
    if rank < G.shape[0]:
        return RadiusEstimate(0.0, 0.0, exact=True, span_deficient=True)
    R = circumradius_polar(P, n_directions=n_directions, seed=seed)
    lower = 0.0 if not np.isfinite(R.upper) else 1.0 / R.upper
    upper = np.inf if R.lower == 0.0 else 1.0 / R.lower
    return RadiusEstimate(lower=lower, upper=upper, exact=R.exact)


def inradius_in_span(P, n_directions=SAMPLING_DIRECTIONS, seed=0):
    """Inradius of P inside the span of its generators.

    Returns (estimate, basis) where basis has orthonormal columns spanning
    the generators.
    """
    G = np.asarray(P.generators, dtype=float)
    rank, basis = _rank_and_basis(G)
    if rank == 0:
        return RadiusEstimate(0.0, 0.0, True, span_deficient=True), basis
    est = inradius(Polytope(basis.T @ G), n_directions=n_directions, seed=seed)
    return est, basis


def _span_dual_direction(a, G):
    """Dual direction restricted to span(G); raises Unbounded when the
    objective vector leaves the span (the unrestricted LP is then
    unbounded)."""
    rank, basis = _rank_and_basis(G)
    if rank == 0:
        raise Unbounded("empty span")
    a_res = basis.T @ a
    if np.linalg.norm(a - basis @ a_res) > 1e-8 * max(np.linalg.norm(a), 1.0):
        raise Unbounded("objective vector outside the generator span")
    lam_res = solvers.dual_direction(a_res, basis.T @ G)
    return basis @ lam_res, basis


def _build_report(ell, i, a_i, dictionary, competitors,
                  n_directions=SAMPLING_DIRECTIONS):
    """Shared certificate evaluation: dual direction in the dictionary span,
    LHS per competitor, span-restricted inradius, conservative verdict."""
    lam, basis = _span_dual_direction(a_i, dictionary)
    lam_norm = np.linalg.norm(lam)
    if lam_norm == 0.0:
        raise Unbounded("dual direction degenerate (zero optimizer)")
    entries = [(k, j, float(abs(lam @ v)) / lam_norm)
               for (k, j, v) in competitors]
    est = inradius(Polytope(basis.T @ dictionary), n_directions=n_directions)
    max_lhs = max((e[2] for e in entries), default=0.0)
    margin = est.lower - max_lhs
    return CertificateReport(subject=(ell, i), entries=entries, inradius=est,
                             holds=bool(margin > 0.0), margin=float(margin),
                             lam=lam)


def _global_index(model, ell, i):
    cols = model.cluster_columns(ell)
    if not 0 <= i < cols.size:
        raise IndexError(f"column {i} out of range for cluster {ell}")
    return cols[i]


def _competitor_columns(model, exclude_ell):
    """(k, j, global_col) for every point of every cluster k != exclude_ell."""
    out = []
    for k in range(model.L):
        if k == exclude_ell:
            continue
        for j, g in enumerate(model.cluster_columns(k)):
            out.append((k, j, g))
    return out


def check_thm_oo(model, X, ell, i, n_directions=SAMPLING_DIRECTIONS):
    """Success condition for the observed-coordinates algorithm: the dual
    direction against the own-cluster dictionary (everything projected onto
    Omega_i and rotated by Q_i') must be strictly less coherent with every
    other-cluster point than the dictionary polytope's inradius."""
    gi = _global_index(model, ell, i)
    omega_i = X.omega(gi)
    if omega_i.size < max(model.dims):
        raise ValueError("need |Omega_i| >= max subspace dimension")
    Q, _, _ = truncated_basis_svd(model, omega_i, ell)
    mask_i = X.mask[:, gi]
    own = model.cluster_columns(ell)
    dict_cols = own[own != gi]
    dictionary = Q.T @ (X.values[:, dict_cols] * mask_i[:, None])
    a_i = Q.T @ X.values[:, gi]
    competitors = [(k, j, Q.T @ (X.values[:, g] * mask_i))
                   for (k, j, g) in _competitor_columns(model, ell)]
    return _build_report(ell, i, a_i, dictionary, competitors, n_directions)


def check_thm_ewzf(model, X, ell, i, n_directions=SAMPLING_DIRECTIONS):
    """As check_thm_oo but for the plain zero-filling algorithm: dictionary
    and competitors are the zero-filled columns without the Omega_i
    projection."""
    gi = _global_index(model, ell, i)
    omega_i = X.omega(gi)
    if omega_i.size < max(model.dims):
        raise ValueError("need |Omega_i| >= max subspace dimension")
    Q, _, _ = truncated_basis_svd(model, omega_i, ell)
    own = model.cluster_columns(ell)
    dict_cols = own[own != gi]
    dictionary = Q.T @ X.values[:, dict_cols]
    a_i = Q.T @ X.values[:, gi]
    competitors = [(k, j, Q.T @ X.values[:, g])
                   for (k, j, g) in _competitor_columns(model, ell)]
    return _build_report(ell, i, a_i, dictionary, competitors, n_directions)


def check_thm_same_location(model, X, ell, i,
                            n_directions=SAMPLING_DIRECTIONS):
    """Same-location success condition, stated in the low-dimensional
    coefficient space: |lam'/||lam|| pinv(V_Omega^l) V_Omega^k a_j| against
    the inradius of the coefficient polytope."""
    if not X.is_same_location():
        raise ValueError("mask is not same-location")
    gi = _global_index(model, ell, i)
    omega = X.omega(gi)
    if omega.size < max(model.dims):
        raise ValueError("need |Omega| >= max subspace dimension")
    A = model.coeffs[ell]
    a_i = A[:, i]
    dictionary = np.delete(A, i, axis=1)
    v_ell = model.bases[ell][omega]
    pinv_v = linalg.pinv(v_ell)
    competitors = []
    for (k, j, g) in _competitor_columns(model, ell):
        v = pinv_v @ (model.bases[k][omega] @ model.coeffs[k][:, j])
        competitors.append((k, j, v))
    return _build_report(ell, i, a_i, dictionary, competitors, n_directions)


def corollary_full_data_lhs(model, ell, i):
    """Full-observation reduction: LHS values |lam'/||lam|| pinv(U^l) U^k a_j|
    with the dual direction taken in the coefficient space. Returns the
    entries in the same (k, j) order as check_thm_same_location."""
    A = model.coeffs[ell]
    a_i = A[:, i]
    dictionary = np.delete(A, i, axis=1)
    lam, _ = _span_dual_direction(a_i, dictionary)
    lam_norm = np.linalg.norm(lam)
    pinv_u = linalg.pinv(model.bases[ell])
    out = []
    for (k, j, g) in _competitor_columns(model, ell):
        v = pinv_u @ (model.bases[k] @ model.coeffs[k][:, j])
        out.append((k, j, float(abs(lam @ v)) / lam_norm))
    return out


def check_case2_worst(model, X, ell, i, n_directions=SAMPLING_DIRECTIONS):
    """Worst-case spectral-norm test for points observed at exactly d
    coordinates, requiring the d x d restricted basis to be invertible."""
    gi = _global_index(model, ell, i)
    omega = X.omega(gi)
    d = max(model.dims)
    if omega.size != d:
        raise ValueError("case-2 check requires |Omega_i| = d")
    v_i = model.bases[ell][omega]  # d x d_l
    res = linalg.svd(v_i, full_matrices=True)
    if res.s.size < v_i.shape[1] or res.s[-1] <= RANK_TOL * res.s[0]:
        raise AssumptionViolated("restricted basis Q_i is rank deficient")
    Q = res.u
    own = model.cluster_columns(ell)
    dict_cols = own[own != gi]
    dictionary = Q.T @ X.values[np.ix_(omega, dict_cols)]
    bound_lhs = 0.0
    for (k, j, g) in _competitor_columns(model, ell):
        v_kj = X.mask[omega, g][:, None] * model.bases[k][omega]
        bound_lhs = max(bound_lhs, float(np.linalg.norm(Q.T @ v_kj, 2)))
    est, _ = inradius_in_span(Polytope(dictionary), n_directions=n_directions)
    return bound_lhs, bound_lhs <= est.lower


def check_case3_worst(model, X, ell, i, alpha=None, grid_points=101,
                      n_directions=SAMPLING_DIRECTIONS):
    """Worst-case split test for |Omega_i| > d: the projection onto the
    restricted basis and the residual must each stay below their share of
    the inradius, for some alpha in [0, 1] (best alpha found on a grid)."""
    gi = _global_index(model, ell, i)
    omega = X.omega(gi)
    v_i = model.bases[ell][omega]
    res = linalg.svd(v_i, full_matrices=False)
    if res.s.size == 0 or res.s[-1] <= RANK_TOL * res.s[0]:
        raise AssumptionViolated("restricted basis Q_i is rank deficient")
    Q = res.u  # |Omega| x d_l, orthonormal columns
    t_proj = 0.0
    t_resid = 0.0
    for (k, j, g) in _competitor_columns(model, ell):
        v_kj = X.mask[omega, g][:, None] * model.bases[k][omega]
        proj = Q @ (Q.T @ v_kj)
        t_proj = max(t_proj, float(np.linalg.norm(Q.T @ v_kj, 2)))
        t_resid = max(t_resid, float(np.linalg.norm(v_kj - proj, 2)))
    own = model.cluster_columns(ell)
    dict_cols = own[own != gi]
    dictionary = X.values[np.ix_(omega, dict_cols)]
    est, _ = inradius_in_span(Polytope(dictionary), n_directions=n_directions)
    r = est.lower
    grid = np.linspace(0.0, 1.0, grid_points)
    margins = np.minimum(grid * r - t_proj, (1.0 - grid) * r - t_resid)
    best = int(np.argmax(margins))
    holds_grid = (grid * r > t_proj) & ((1.0 - grid) * r >= t_resid)
    details = {
        "proj_norm": t_proj,
        "resid_norm": t_resid,
        "inradius": est,
        "best_alpha": float(grid[best]),
        "best_margin": float(margins[best]),
    }
    if alpha is not None:
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        holds = (t_proj < alpha * r) and (t_resid <= (1.0 - alpha) * r)
        details["alpha"] = alpha
    else:
        holds = bool(np.any(holds_grid))
    return holds, details


def expected_coherence(model, omega, ell, k):
    """Average-case coherence || pinv(V_Omega^l) V_Omega^k ||_F / d for
    same-location sampling (quadratic-mean of the certificate LHS under
    sphere-uniform coefficients and dual directions)."""
    omega = np.asarray(omega, dtype=int)
    v_ell = model.bases[ell][omega]
    res = linalg.svd(v_ell, full_matrices=False)
    if (res.s.size < v_ell.shape[1] or res.s.size == 0
            or res.s[-1] <= RANK_TOL * res.s[0]):
        raise AssumptionViolated("restricted basis V_Omega^l is rank "
                                 "deficient")
    m = linalg.pinv(v_ell) @ model.bases[k][omega]
    return float(np.linalg.norm(m, "fro")) / max(model.dims)


def beta_ratio_diagnostic(model, X, ell, i):
    """Experimental diagnostic for the unproven step of the same-location
    proof: compares ||lam_tilde|| / R(polar(V A_-i)) against
    ||V' lam_tilde|| / R(polar(A_-i)). Returns (beta1, beta2)."""
    if not X.is_same_location():
        raise ValueError("mask is not same-location")
    gi = _global_index(model, ell, i)
    omega = X.omega(gi)
    A = np.delete(model.coeffs[ell], i, axis=1)
    a_i = model.coeffs[ell][:, i]
    lam_bar, _ = _span_dual_direction(a_i, A)
    v = model.bases[ell][omega]  # |Omega| x d
    lam_tilde = linalg.pinv(v.T) @ lam_bar
    va = v @ A
    rank, basis = _rank_and_basis(va)
    R_va = circumradius_polar(Polytope(basis.T @ va))
    R_a = circumradius_polar(Polytope(A))
    beta1 = float(np.linalg.norm(lam_tilde)) / R_va.lower
    beta2 = float(np.linalg.norm(v.T @ lam_tilde)) / R_a.lower
    return beta1, beta2


def write_certificate_report_csv(path, reports):
    """One row per (ell, i, k, j) competitor entry."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ell", "i", "k", "j", "lhs", "inradius_lower",
                         "inradius_upper", "exact", "holds", "margin"])
        for rep in reports:
            ell, i = rep.subject
            for (k, j, lhs) in rep.entries:
                writer.writerow([ell, i, k, j, f"{lhs:.17g}",
                                 f"{rep.inradius.lower:.17g}",
                                 f"{rep.inradius.upper:.17g}",
                                 int(rep.inradius.exact), int(rep.holds),
                                 f"{rep.margin:.17g}"])
