"""Confidence-ball sparse covariance estimator.

Normalize to the correlation scale, resolve a ball radius (calibrated,
coverage-level, or explicit), binary-search the largest threshold whose
shrunk matrix stays inside the ball, and rescale back to the covariance
scale.  PSD repair and support extraction live here too.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .calibrate import FprTarget, radius_for_fpr
from .concentration import Regime, radius_from_alpha
from .covmodel import to_correlation
from .linalg import check_sym, entrywise_norm, schatten_norm, symmetrize
from .threshold import ThresholdRule, apply_threshold


@dataclass(frozen=True)
class Metric:
    """Distance used for the ball feasibility test."""

    kind: str
    p: float = math.inf
    q: float = math.inf

    def __post_init__(self):
        if self.kind not in ("op", "fro", "entrywise"):
            raise ValueError(f"unknown metric {self.kind!r}")

    @classmethod
    def operator_norm(cls):
        return cls(kind="op")

    @classmethod
    def frobenius(cls):
        return cls(kind="fro")

    @classmethod
    def entrywise(cls, p, q):
        return cls(kind="entrywise", p=float(p), q=float(q))

    def distance(self, a, b):
        if self.kind == "op":
            return schatten_norm(a - b, math.inf)
        if self.kind == "fro":
            return entrywise_norm(a - b, 2.0, 2.0)
        return entrywise_norm(a - b, self.p, self.q)

    def describe(self):
        if self.kind == "entrywise":
            return f"entrywise({self.p:g},{self.q:g})"
        return self.kind


@dataclass(frozen=True)
class FprRadius:
    """Radius calibrated to a target false positive rate rho in (0, 0.5]."""

    rho: float

    def __post_init__(self):
        if not 0.0 < self.rho <= 0.5:
            raise ValueError(f"rho must lie in (0, 0.5], got {self.rho}")


@dataclass(frozen=True)
class AlphaRadius:
    """Radius from a coverage level alpha under a tail regime, for sample size n."""

    regime: Regime
    alpha: float
    n: int

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.n < 1:
            raise ValueError(f"sample size must be positive, got {self.n}")


@dataclass(frozen=True)
class ExplicitRadius:
    """User-supplied ball radius."""

    r: float

    def __post_init__(self):
        if self.r < 0.0:
            raise ValueError(f"radius must be nonnegative, got {self.r}")


@dataclass(frozen=True)
class EstimatorConfig:
    """Configuration of the ball-constrained threshold search."""

    radius_source: object
    rule: ThresholdRule = field(default_factory=ThresholdRule.hard)
    metric: Metric = field(default_factory=Metric.operator_norm)
    iterations: int = 10

    def __post_init__(self):
        if not isinstance(self.radius_source, (FprRadius, AlphaRadius, ExplicitRadius)):
            raise ValueError(
                f"unsupported radius source {type(self.radius_source).__name__}")
        if self.iterations < 1:
            raise ValueError(f"need at least one iteration, got {self.iterations}")


@dataclass(frozen=True, eq=False)
class SparseCovEstimate:
    """Estimation result bundle.

    matrix is on the covariance scale, corr_matrix on the unit-diagonal scale
    it was searched on; support holds 0-based off-diagonal pairs (i, j) with
    i > j and nonzero corr_matrix entry.
    """

    matrix: np.ndarray
    corr_matrix: np.ndarray
    lambda_star: float
    radius: float
    support: frozenset
    config: EstimatorConfig
    target: FprTarget = None


def _bisect_threshold(corr, rule, metric, r, iterations):
    # lam = 0 is always feasible (shrinkage at zero threshold is the identity,
    # distance 0 <= r), so it seeds the best-feasible tracker.  The operator
    # norm distance is only roughly increasing in lam, hence tracking the
    # largest feasible lam visited instead of trusting the final iterate;
    # for monotone metrics this coincides with plain bisection.
    best = 0.0
    lam = 0.5
    for i in range(1, iterations + 1):
        if metric.distance(apply_threshold(corr, rule, lam), corr) <= r:
            best = max(best, lam)
            lam += 2.0 ** (-i - 1)
        else:
            lam -= 2.0 ** (-i - 1)
    return best


def sparse_estimate(m, config):
    """Run the ball-constrained threshold search on a covariance matrix."""
    m = check_sym(m)
    corr, scale = to_correlation(m)
    target = None
    src = config.radius_source
    if isinstance(src, FprRadius):
        r, target, _ = radius_for_fpr(corr, src.rho)
    elif isinstance(src, AlphaRadius):
        r = radius_from_alpha(src.regime, src.n, src.alpha)
    else:
        r = src.r
    lam_star = _bisect_threshold(corr, config.rule, config.metric, r, config.iterations)
    corr_est = apply_threshold(corr, config.rule, lam_star)
    return SparseCovEstimate(
        matrix=corr_est * np.outer(scale, scale),
        corr_matrix=corr_est,
        lambda_star=float(lam_star),
        radius=float(r),
        support=support_of(corr_est, 0.0),
        config=config,
        target=target,
    )


def shift_gamma(m, eps):
    """Diagonal shift needed to make m + gamma*I positive definite by eps."""
    lam_min = float(np.linalg.eigvalsh(check_sym(m))[0])
    return max(0.0, -lam_min + float(eps))


def psd_repair(m, mode, eps):
    """Repair an indefinite symmetric matrix.

    mode "shift" adds gamma*I with gamma = max(0, -min_eigenvalue + eps),
    leaving the off-diagonal support untouched.  mode "clip" zeroes negative
    eigenvalues, which does NOT preserve the support.
    """
    m = check_sym(m)
    if not eps > 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    if mode == "shift":
        return m + shift_gamma(m, eps) * np.eye(m.shape[0])
    if mode == "clip":
        vals, vecs = np.linalg.eigh(m)
        return symmetrize((vecs * np.clip(vals, 0.0, None)) @ vecs.T)
    raise ValueError(f"unknown repair mode {mode!r}")


def support_of(m, tol=0.0):
    """Off-diagonal pairs (i, j), i > j, with |m[i][j]| strictly above tol."""
    m = check_sym(m)
    if tol < 0.0:
        raise ValueError(f"tolerance must be nonnegative, got {tol}")
    il = np.tril_indices(m.shape[0], -1)
    keep = np.abs(m[il]) > tol
    return frozenset(zip(il[0][keep].tolist(), il[1][keep].tolist()))
