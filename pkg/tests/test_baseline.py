"""Cross-validated thresholding and the diagonal straw man."""

import numpy as np
import pytest

from covcal import (
    CvConfig,
    SampleSizeError,
    ThresholdRule,
    apply_threshold,
    cv_threshold,
    diagonal_estimator,
    empirical_cov,
    entrywise_norm,
    to_correlation,
)
from covcal.baseline import _split_risks


def test_config_validation():
    with pytest.raises(ValueError, match="nonempty"):
        CvConfig(rule=ThresholdRule.hard(), grid=[])
    with pytest.raises(ValueError, match="ascending"):
        CvConfig(rule=ThresholdRule.hard(), grid=[0.5, 0.2])
    with pytest.raises(ValueError, match="ascending"):
        CvConfig(rule=ThresholdRule.hard(), grid=[-0.1, 0.2])
    with pytest.raises(ValueError, match="split"):
        CvConfig(rule=ThresholdRule.hard(), splits=0)


def test_default_grid_spans_the_offdiagonal_range():
    rng = np.random.default_rng(25)
    x = rng.standard_normal((30, 5))
    full = empirical_cov(x)
    grid = CvConfig(rule=ThresholdRule.hard()).resolved_grid(full)
    corr, _ = to_correlation(full)
    hi = np.abs(corr[np.triu_indices(5, 1)]).max()
    assert grid.size == 50
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(hi)
    assert np.all(np.diff(grid) > 0.0)


def test_explicit_grid_passes_through():
    cfg = CvConfig(rule=ThresholdRule.hard(), grid=[0.0, 0.5])
    np.testing.assert_array_equal(cfg.resolved_grid(np.eye(2)), [0.0, 0.5])


def test_ties_break_toward_the_larger_threshold():
    # both grid levels exceed every achievable half-sample covariance entry,
    # so they produce identical (all-zero off-diagonal) estimates and tie;
    # the tie must resolve to the larger, sparser level
    rng = np.random.default_rng(26)
    x = rng.uniform(-1.0, 1.0, (12, 3))  # every covariance entry is below 4
    cfg = CvConfig(rule=ThresholdRule.hard(), grid=[5.0, 6.0])
    lam, est = cv_threshold(x, cfg, rng=0)
    assert lam == 6.0
    assert np.all(est[~np.eye(3, dtype=bool)] == 0.0)


def test_single_split_risk_oracle():
    # reproduce one seeded split by hand: risks are Frobenius distances from
    # the thresholded first-half covariance to the raw second-half covariance
    rng_seed = 27
    x = np.random.default_rng(28).standard_normal((9, 4))
    grid = np.linspace(0.0, 0.6, 7)
    cfg = CvConfig(rule=ThresholdRule.hard(), grid=grid, splits=1)
    lam, est = cv_threshold(x, cfg, rng=rng_seed)

    perm = np.random.default_rng(rng_seed).permutation(9)
    cov1 = empirical_cov(x[perm[:4]])  # floor(9/2) rows
    cov2 = empirical_cov(x[perm[4:]])
    risks = [entrywise_norm(apply_threshold(cov1, cfg.rule, g) - cov2, 2, 2)
             for g in grid]
    best = len(grid) - 1 - int(np.argmin(risks[::-1]))
    assert lam == grid[best]
    corr, scale = to_correlation(empirical_cov(x))
    np.testing.assert_array_equal(
        est, apply_threshold(corr, cfg.rule, lam) * np.outer(scale, scale))


def test_hard_risk_curve_is_piecewise_constant_in_the_threshold():
    # one half has off-diagonal 0.9, the other 0: the hard-rule risk is
    # sqrt(2)*0.9 while the entry is kept (lam <= 0.9, boundary inclusive)
    # and exactly 0 once it is dropped
    cov1 = np.array([[1.0, 0.9], [0.9, 1.0]])
    cov2 = np.eye(2)
    grid = np.array([0.0, 0.5, 0.9, 0.90001, 1.0])
    risks = _split_risks(cov1, cov2, ThresholdRule.hard(), grid)
    np.testing.assert_allclose(risks[:3], np.sqrt(2.0) * 0.9, rtol=1e-12)
    np.testing.assert_array_equal(risks[3:], 0.0)
    # the whole zero plateau ties; the selection rule takes its largest point
    best = grid.size - 1 - int(np.argmin(risks[::-1]))
    assert grid[best] == 1.0


def test_needs_at_least_four_observations():
    with pytest.raises(SampleSizeError, match="n >= 4"):
        cv_threshold(np.zeros((3, 2)) + np.arange(3)[:, None],
                     CvConfig(rule=ThresholdRule.hard()), rng=0)


def test_single_variable_sample_selects_zero():
    x = np.random.default_rng(29).standard_normal((10, 1))
    lam, est = cv_threshold(x, CvConfig(rule=ThresholdRule.soft()), rng=0)
    assert lam == 0.0
    np.testing.assert_allclose(est, empirical_cov(x), rtol=1e-15)


def test_cv_estimate_lives_on_the_covariance_scale():
    rng = np.random.default_rng(30)
    x = rng.standard_normal((40, 4)) * np.array([1.0, 3.0, 0.5, 2.0])
    lam, est = cv_threshold(x, CvConfig(rule=ThresholdRule.soft()), rng=1)
    full = empirical_cov(x)
    # the threshold acts on the correlation scale, so variances pass through
    np.testing.assert_allclose(np.diag(est), np.diag(full), rtol=1e-15)
    corr, scale = to_correlation(full)
    np.testing.assert_array_equal(
        est, apply_threshold(corr, ThresholdRule.soft(), lam) * np.outer(scale, scale))


def test_diagonal_estimator_zeroes_off_diagonals():
    rng = np.random.default_rng(31)
    x = rng.standard_normal((20, 4))
    est = diagonal_estimator(x)
    np.testing.assert_array_equal(est, np.diag(np.diag(empirical_cov(x))))
    assert np.all(est[~np.eye(4, dtype=bool)] == 0.0)
