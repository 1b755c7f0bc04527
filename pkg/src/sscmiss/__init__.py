"""Sparse subspace clustering under missing data.

Entry-wise zero-filling clustering algorithms, deterministic
success-condition checkers built on centro-symmetric polytope geometry,
per-cluster SVT completion, and a reproducible experiment harness.
"""

from .affinity import (Affinity, affinity_ewzf, affinity_ewzf_oo,
                       affinity_ewzf_oo_lasso, affinity_tsc, default_tsc_q,
                       spectral_cluster)
from .completion import (CompletionResult, complete_by_cluster,
                         identify_subspace, svt_complete)
from .datagen import (ObservedMatrix, SamplingSpec, UoSModel, generate_model,
                      normalize_observed, sample, sample_matrix,
                      truncated_basis_svd)
from .geomcert import (CertificateReport, Polytope, RadiusEstimate,
                       check_case2_worst, check_case3_worst, check_thm_ewzf,
                       check_thm_oo, check_thm_same_location,
                       circumradius_polar, expected_coherence, inradius,
                       inradius_in_span)
from .harness import SweepConfig, SweepResult, emit, run_trial, sweep
from .metrics import (clustering_error, completion_error, grassmann_error,
                      match_subspaces, principal_angle_error)
from .solvers import (Infeasible, NotConverged, SparseSolution, Unbounded,
                      basis_pursuit, dual_direction, lasso, lasso_lambda_rule)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
