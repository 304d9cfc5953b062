"""Sparse covariance estimation with concentration-calibrated confidence balls.

The pipeline: normalize the empirical covariance to the correlation scale,
calibrate a ball radius to a target false positive rate (or a coverage
level), binary-search the largest threshold whose shrunk matrix stays inside
the ball, and rescale.  A simulation harness benchmarks the estimator and
cross-validated baselines over replicated draws.
"""

from .baseline import CvConfig, cv_threshold, diagonal_estimator
from .calibrate import (FprTarget, SparsityClass, SupportMetrics, eta_split,
                        fpr_interpolation_gap, keep_quantile_threshold,
                        radius_for_fpr, support_metrics)
from .concentration import Regime, alpha_from_radius, radius_from_alpha
from .covmodel import (CovModel, DegenerateVariableError, Sample,
                       SampleSizeError, as_sample, empirical_cov,
                       model_matrix, to_correlation)
from .estimator import (AlphaRadius, EstimatorConfig, ExplicitRadius,
                        FprRadius, Metric, SparseCovEstimate, psd_repair,
                        shift_gamma, sparse_estimate, support_of)
from .linalg import (EigenPair, NotPsdError, check_sym, entrywise_norm,
                     opnorm_bounds, psd_sqrt, schatten_norm, sym_eigen,
                     symmetrize)
from .simharness import (DEFAULT_SEED, Baseline, Calibrated, Diagonal,
                         Empirical, ExperimentReport, ExperimentSpec,
                         MethodSummary, fstat_rank, gen_gaussian, gen_laplace,
                         gen_rademacher, run_experiment, symmetrization_scan)
from .threshold import ThresholdRule, apply_threshold, shrink

__version__ = "0.1.0"

__all__ = [
    "AlphaRadius", "Baseline", "Calibrated", "CovModel", "CvConfig",
    "DEFAULT_SEED", "DegenerateVariableError", "Diagonal", "EigenPair",
    "Empirical", "EstimatorConfig", "ExperimentReport", "ExperimentSpec",
    "ExplicitRadius", "FprRadius", "FprTarget", "Metric", "MethodSummary",
    "NotPsdError", "Regime", "Sample", "SampleSizeError", "SparseCovEstimate",
    "SparsityClass", "SupportMetrics", "ThresholdRule", "alpha_from_radius",
    "apply_threshold", "as_sample", "check_sym", "cv_threshold",
    "diagonal_estimator", "empirical_cov", "entrywise_norm", "eta_split",
    "fpr_interpolation_gap", "fstat_rank", "gen_gaussian", "gen_laplace",
    "gen_rademacher", "keep_quantile_threshold", "model_matrix",
    "opnorm_bounds", "psd_repair", "psd_sqrt", "radius_for_fpr",
    "radius_from_alpha", "run_experiment", "schatten_norm", "shift_gamma",
    "shrink", "sparse_estimate", "support_metrics", "support_of", "sym_eigen",
    "symmetrize", "symmetrization_scan", "to_correlation",
]
