"""False-positive-rate calibration of the confidence-ball radius.

Given a target rate rho in (0, 0.5], double it up into the reference level
eta = 2^a * rho in (0.5, 1], threshold the correlation matrix at the
eta-keep quantile of its off-diagonal magnitudes, and inflate the norm of
the removed part by 2^a to obtain the ball radius.  Also houses support
recovery metrics and a Monte Carlo diagnostic for the rate-interpolation
identity behind the construction.
"""

import math
from dataclasses import dataclass

import numpy as np

from .covmodel import empirical_cov, model_matrix, to_correlation
from .linalg import check_sym, schatten_norm
from .threshold import ThresholdRule, apply_threshold


@dataclass(frozen=True)
class FprTarget:
    """A false positive rate rho with its doubling exponent a and eta = 2^a * rho."""

    rho: float
    a: int
    eta: float


@dataclass(frozen=True)
class SupportMetrics:
    """Support recovery counts and rates over off-diagonal pairs i > j.

    Rates are normalized per class: false_positive_rate = fp_count over
    true-zero pairs, true_positive_rate = tp_count over true-nonzero pairs,
    with 0 when the denominator is empty.  Raw counts are exposed so other
    normalizations can be recomputed.
    """

    false_positive_rate: float
    true_positive_rate: float
    fp_count: int
    tp_count: int
    true_zero_count: int
    true_nonzero_count: int


@dataclass(frozen=True)
class SparsityClass:
    """Sparsity class parameters: at most kappa nonzeros per row/column, each
    of magnitude at least delta.  Used by diagnostics only."""

    kappa: int
    delta: float

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError(f"kappa must be a positive integer, got {self.kappa}")
        if not self.delta > 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")


def _split_level(rho, upper):
    # smallest a >= 0 with 2^a * rho in (0.5, 1]
    if not 0.0 < rho <= upper:
        raise ValueError(f"rate must lie in (0, {upper}], got {rho}")
    a = 0
    eta = float(rho)
    while eta <= 0.5:
        a += 1
        eta = (2.0 ** a) * rho
    return FprTarget(rho=float(rho), a=a, eta=eta)


def eta_split(rho):
    """Split rho in (0, 0.5] as eta = 2^a * rho with eta in (0.5, 1], a minimal."""
    return _split_level(rho, 0.5)


def _check_unit_diag(corr, min_dim=2):
    corr = check_sym(corr, "correlation matrix")
    if corr.shape[0] < min_dim:
        raise ValueError(f"need dimension >= {min_dim}, got {corr.shape[0]}")
    if not np.allclose(np.diag(corr), 1.0, rtol=0.0, atol=1e-8):
        raise ValueError("matrix must have unit diagonal")
    return corr


def _offdiag_magnitudes(corr):
    iu = np.triu_indices(corr.shape[0], 1)
    return np.abs(corr[iu])


def keep_quantile_threshold(corr, eta):
    """Smallest threshold keeping at most an eta-fraction of off-diagonal
    magnitudes strictly above it.

    Returns the ceil(N*(1-eta))-th smallest off-diagonal magnitude, with
    N = d(d-1)/2, or 0 when that index is 0 (eta = 1).
    """
    corr = _check_unit_diag(corr)
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    mags = _offdiag_magnitudes(corr)
    # tiny slack so floating noise in N*(1-eta) cannot push past an integer
    m = int(math.ceil(mags.size * (1.0 - eta) - 1e-9))
    if m <= 0:
        return 0.0
    return float(np.partition(mags, m - 1)[m - 1])


def radius_for_fpr(corr, rho):
    """Ball radius calibrated to false positive rate rho on the correlation scale.

    Hard-threshold the correlation matrix at the eta-keep quantile and return
    r = 2^a * operator norm of the removed part, together with the split
    target and the quantile threshold used.
    """
    corr = _check_unit_diag(corr)
    target = eta_split(rho)
    lam_eta = keep_quantile_threshold(corr, target.eta)
    removed = corr - apply_threshold(corr, ThresholdRule.hard(), lam_eta)
    r = (2.0 ** target.a) * schatten_norm(removed, math.inf)
    return float(r), target, float(lam_eta)


def support_metrics(estimate, truth, tol=0.0):
    """Support recovery counts of an estimate against the true matrix.

    An off-diagonal pair i > j counts as nonzero when its magnitude exceeds
    tol (strictly); tol applies to estimate and truth alike.
    """
    estimate = check_sym(estimate, "estimate")
    truth = check_sym(truth, "truth")
    if estimate.shape != truth.shape:
        raise ValueError(
            f"dimension mismatch: estimate {estimate.shape} vs truth {truth.shape}")
    if tol < 0.0:
        raise ValueError(f"tolerance must be nonnegative, got {tol}")
    iu = np.triu_indices(estimate.shape[0], 1)
    est_nz = np.abs(estimate[iu]) > tol
    tru_nz = np.abs(truth[iu]) > tol
    fp = int(np.count_nonzero(est_nz & ~tru_nz))
    tp = int(np.count_nonzero(est_nz & tru_nz))
    zeros = int(np.count_nonzero(~tru_nz))
    nonzeros = int(np.count_nonzero(tru_nz))
    return SupportMetrics(
        false_positive_rate=fp / zeros if zeros else 0.0,
        true_positive_rate=tp / nonzeros if nonzeros else 0.0,
        fp_count=fp,
        tp_count=tp,
        true_zero_count=zeros,
        true_nonzero_count=nonzeros,
    )


# ===== rate-interpolation diagnostic =====================================
# The calibration rests on an interpolation identity between the achieved
# rates at levels rho and eta = 2^a * rho.  The Monte Carlo gap below
# measures |eta * E||S_rho - S_0|| / E||S_eta - S_0|| - rho| with S_x the
# correlation matrix oracle-thresholded to an exact false-positive fraction
# x and S_0 its diagonal-only counterpart.


def _oracle_keep_mask(vals, zero_mask, k):
    # keep-threshold chosen so exactly k true-zero entries survive (ties aside)
    zmags = np.abs(vals[zero_mask])
    if k <= 0:
        cut = np.nextafter(zmags.max(), np.inf) if zmags.size else np.inf
    elif k >= zmags.size:
        cut = 0.0
    else:
        cut = np.partition(zmags, zmags.size - k)[zmags.size - k]
    return np.abs(vals) >= cut


def _interpolation_terms(d, n, rho, truth, generator, reps, rng=0):
    if reps < 1:
        raise ValueError(f"need at least one replication, got {reps}")
    target = _split_level(rho, 1.0)
    sigma = model_matrix(truth, d)
    iu = np.triu_indices(d, 1)
    zero_mask = np.abs(sigma[iu]) == 0.0
    n_pairs = iu[0].size
    k_rho = min(int(round(target.rho * n_pairs)), n_pairs)
    k_eta = min(int(round(target.eta * n_pairs)), n_pairs)
    base = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    streams = base.spawn(reps)
    num = np.empty(reps)
    den = np.empty(reps)
    scratch = np.zeros((d, d))
    for r in range(reps):
        sample = generator(sigma, n, streams[r])
        corr, _ = to_correlation(empirical_cov(sample))
        vals = corr[iu]
        for k, out in ((k_rho, num), (k_eta, den)):
            kept = np.where(_oracle_keep_mask(vals, zero_mask, k), vals, 0.0)
            scratch[iu] = kept
            scratch[(iu[1], iu[0])] = kept
            out[r] = schatten_norm(scratch, math.inf)
    return num, den, target


def fpr_interpolation_gap(d, n, rho, truth, generator, reps, rng=0):
    """Monte Carlo gap in the rate-interpolation identity at level rho.

    truth is a covariance model, generator draws a Sample from (sigma, n,
    rng), and rho may lie anywhere in (0, 1] (rho > 0.5 gives a = 0, where
    the gap vanishes identically).  Returns a nonnegative scalar; diagnostic
    only.
    """
    num, den, target = _interpolation_terms(d, n, rho, truth, generator, reps, rng)
    ratio = float(num.mean()) / float(den.mean())
    return abs(target.eta * ratio - target.rho)
