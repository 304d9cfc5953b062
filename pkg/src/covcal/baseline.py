"""Comparison estimators: cross-validated universal thresholding and the
empirical-diagonal straw man.

Cross validation repeatedly splits the sample in half, thresholds the
covariance of one half, and scores it against the raw covariance of the
other half in Frobenius distance; the final estimate thresholds the
full-sample covariance at the selected level.
"""

from dataclasses import dataclass

import numpy as np

from .covmodel import SampleSizeError, as_sample, empirical_cov, to_correlation
from .linalg import entrywise_norm
from .threshold import apply_threshold


@dataclass(frozen=True, eq=False)
class CvConfig:
    """Cross-validation setup: shrinkage rule, candidate grid, split count.

    grid = None derives the default at fit time: 50 evenly spaced points on
    [0, max off-diagonal magnitude of the full-sample correlation].  The loss
    is fixed to the Frobenius distance.
    """

    rule: object
    grid: np.ndarray = None
    splits: int = 10

    def __post_init__(self):
        if self.grid is not None:
            grid = np.asarray(self.grid, dtype=float)
            if grid.ndim != 1 or grid.size == 0:
                raise ValueError("grid must be a nonempty 1-d array")
            if np.any(grid < 0.0) or np.any(np.diff(grid) < 0.0):
                raise ValueError("grid must be ascending and nonnegative")
            object.__setattr__(self, "grid", grid)
        if self.splits < 1:
            raise ValueError(f"need at least one split, got {self.splits}")

    def resolved_grid(self, full_cov):
        if self.grid is not None:
            return self.grid
        corr, _ = to_correlation(full_cov)
        off = np.abs(corr[np.triu_indices(corr.shape[0], 1)])
        hi = float(off.max()) if off.size else 0.0
        return np.linspace(0.0, hi, 50)


def _split_risks(cov1, cov2, rule, grid):
    # Frobenius risk of thresholding cov1 at each grid level, scored against cov2
    return np.array([
        entrywise_norm(apply_threshold(cov1, rule, lam) - cov2, 2.0, 2.0)
        for lam in grid
    ])


def cv_threshold(s, cfg, rng):
    """Select a threshold by repeated half-sample cross validation.

    The risks score thresholded half-sample covariances directly; the final
    estimate shrinks the full-sample correlation at the selected level and is
    returned rescaled to the covariance scale.  Ties in the averaged risk
    break toward the larger (sparser) threshold.
    """
    s = as_sample(s)
    if s.n < 4:
        raise SampleSizeError(f"cross validation needs n >= 4, got n={s.n}")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    full = empirical_cov(s)
    grid = cfg.resolved_grid(full)
    half = s.n // 2
    risks = np.zeros(grid.size)
    for _ in range(cfg.splits):
        perm = rng.permutation(s.n)
        cov1 = empirical_cov(s.data[perm[:half]])
        cov2 = empirical_cov(s.data[perm[half:]])
        risks += _split_risks(cov1, cov2, cfg.rule, grid)
    risks /= cfg.splits
    # last index attaining the minimum = largest tied threshold
    best = grid.size - 1 - int(np.argmin(risks[::-1]))
    lam_hat = float(grid[best])
    corr, scale = to_correlation(full)
    estimate = apply_threshold(corr, cfg.rule, lam_hat) * np.outer(scale, scale)
    return lam_hat, estimate


def diagonal_estimator(s):
    """Empirical covariance with every off-diagonal entry zeroed."""
    return np.diag(np.diag(empirical_cov(s)))
