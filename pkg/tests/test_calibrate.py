"""Rate splitting, keep-quantile thresholds, calibrated radii, support metrics."""

import math

import numpy as np
import pytest

from covcal import (
    CovModel,
    SparsityClass,
    eta_split,
    fpr_interpolation_gap,
    gen_gaussian,
    keep_quantile_threshold,
    radius_for_fpr,
    support_metrics,
)


def corr_with_offdiags(values):
    """Unit-diagonal symmetric matrix with the given upper-triangle entries."""
    n_pairs = len(values)
    d = int(round((1 + math.sqrt(1 + 8 * n_pairs)) / 2))
    m = np.eye(d)
    iu = np.triu_indices(d, 1)
    m[iu] = values
    m[(iu[1], iu[0])] = values
    return m


def test_eta_split_frozen_values():
    for rho, a, eta in [(0.5, 1, 1.0), (0.3, 1, 0.6), (0.25, 2, 1.0),
                        (0.05, 4, 0.8), (0.01, 6, 0.64)]:
        target = eta_split(rho)
        assert target.rho == rho
        assert target.a == a
        assert target.eta == pytest.approx(eta)


def test_eta_split_lands_in_the_half_open_interval():
    rng = np.random.default_rng(13)
    for rho in rng.uniform(1e-6, 0.5, 200):
        target = eta_split(rho)
        assert 0.5 < target.eta <= 1.0
        assert target.eta == (2.0 ** target.a) * rho
        # minimality: one fewer doubling falls at or below 1/2
        assert (2.0 ** (target.a - 1)) * rho <= 0.5


def test_eta_split_domain():
    for bad in (0.0, -0.1, 0.51, 1.0):
        with pytest.raises(ValueError, match="rate must lie"):
            eta_split(bad)


def test_keep_quantile_threshold_hand_values():
    corr = corr_with_offdiags([0.1, -0.2, 0.3])
    assert keep_quantile_threshold(corr, 1.0) == 0.0
    assert keep_quantile_threshold(corr, 2.0 / 3.0) == pytest.approx(0.1)
    assert keep_quantile_threshold(corr, 0.6) == pytest.approx(0.2)
    assert keep_quantile_threshold(corr, 1.0 / 3.0) == pytest.approx(0.2)
    assert keep_quantile_threshold(corr, 0.1) == pytest.approx(0.3)


def test_keep_quantile_threshold_keeps_at_most_the_eta_fraction():
    rng = np.random.default_rng(14)
    for _ in range(50):
        d = int(rng.integers(3, 9))
        corr = corr_with_offdiags(rng.uniform(-1.0, 1.0, d * (d - 1) // 2))
        eta = float(rng.uniform(0.05, 1.0))
        lam = keep_quantile_threshold(corr, eta)
        iu = np.triu_indices(d, 1)
        mags = np.abs(corr[iu])
        assert np.count_nonzero(mags > lam) <= eta * mags.size + 1e-9


def test_keep_quantile_threshold_brute_force_oracle():
    # smallest candidate (0 or an observed magnitude) keeping at most an
    # eta-fraction strictly above it, found by linear scan
    rng = np.random.default_rng(15)
    for _ in range(50):
        d = int(rng.integers(3, 9))
        mags = rng.uniform(0.0, 1.0, d * (d - 1) // 2)
        if rng.random() < 0.3:  # exercise ties
            mags = np.round(mags, 1)
        corr = corr_with_offdiags(mags * np.where(rng.random(mags.size) < 0.5, 1, -1))
        eta = float(rng.uniform(0.05, 1.0))
        candidates = np.concatenate([[0.0], np.sort(np.abs(mags))])
        keep_ok = [np.count_nonzero(np.abs(mags) > c) <= eta * mags.size + 1e-9
                   for c in candidates]
        oracle = float(candidates[int(np.argmax(keep_ok))])
        assert keep_quantile_threshold(corr, eta) == pytest.approx(oracle, abs=1e-12)


def test_keep_quantile_threshold_input_checks():
    corr = corr_with_offdiags([0.1, 0.2, 0.3])
    with pytest.raises(ValueError, match="eta"):
        keep_quantile_threshold(corr, 0.0)
    with pytest.raises(ValueError, match="eta"):
        keep_quantile_threshold(corr, 1.1)
    with pytest.raises(ValueError, match="unit diagonal"):
        keep_quantile_threshold(2.0 * np.eye(3), 0.8)
    with pytest.raises(ValueError, match="dimension"):
        keep_quantile_threshold(np.eye(1), 0.8)


def test_radius_for_fpr_hand_example():
    # rho=0.3 doubles once to eta=0.6; the keep quantile of (0.1, 0.2, 0.3)
    # at 0.6 is 0.2, hard thresholding there removes only the 0.1 pair, and
    # that removed matrix has operator norm 0.1, inflated by 2^1.
    corr = corr_with_offdiags([0.1, -0.2, 0.3])
    r, target, lam = radius_for_fpr(corr, 0.3)
    assert (target.a, target.eta) == (1, pytest.approx(0.6))
    assert lam == pytest.approx(0.2)
    assert r == pytest.approx(0.2)


def test_radius_for_fpr_is_permutation_invariant():
    rng = np.random.default_rng(16)
    corr = corr_with_offdiags(rng.uniform(-0.9, 0.9, 15))  # d = 6
    perm = rng.permutation(6)
    permuted = corr[np.ix_(perm, perm)]
    r1, _, lam1 = radius_for_fpr(corr, 0.05)
    r2, _, lam2 = radius_for_fpr(permuted, 0.05)
    assert r2 == pytest.approx(r1, rel=1e-12)
    assert lam2 == pytest.approx(lam1, rel=1e-12)


def test_radius_for_fpr_zero_when_everything_is_kept():
    # eta = 1 keeps all entries, so nothing is removed and the radius is 0
    corr = corr_with_offdiags([0.4, 0.1, -0.3])
    r, target, lam = radius_for_fpr(corr, 0.5)
    assert target.eta == 1.0
    assert lam == 0.0
    assert r == 0.0


def test_support_metrics_hand_counts():
    est = corr_with_offdiags([0.5, 0.0, 0.2])
    truth = corr_with_offdiags([0.4, 0.0, 0.0])
    sm = support_metrics(est, truth)
    assert (sm.tp_count, sm.fp_count) == (1, 1)
    assert (sm.true_nonzero_count, sm.true_zero_count) == (1, 2)
    assert sm.true_positive_rate == 1.0
    assert sm.false_positive_rate == 0.5


def test_support_metrics_empty_denominators():
    identity = np.eye(4)
    dense = corr_with_offdiags(np.full(6, 0.3))
    assert support_metrics(identity, identity).false_positive_rate == 0.0
    assert support_metrics(identity, identity).true_positive_rate == 0.0
    assert support_metrics(dense, dense).false_positive_rate == 0.0
    assert support_metrics(dense, dense).true_positive_rate == 1.0


def test_support_metrics_tolerance_is_strict():
    est = corr_with_offdiags([0.1, 0.0, 0.0])
    truth = corr_with_offdiags([0.1, 0.0, 0.0])
    assert support_metrics(est, truth, tol=0.1).tp_count == 0
    assert support_metrics(est, truth, tol=0.0999).tp_count == 1
    with pytest.raises(ValueError, match="mismatch"):
        support_metrics(np.eye(3), np.eye(4))
    with pytest.raises(ValueError, match="nonnegative"):
        support_metrics(est, truth, tol=-1.0)


def test_interpolation_gap_vanishes_without_doubling():
    # any rate above 1/2 needs no doubling (a=0), where the two oracle
    # thresholds coincide by construction and the gap is identically zero
    gap = fpr_interpolation_gap(10, 20, 0.75, CovModel.tridiag(0.3),
                                gen_gaussian, reps=3, rng=17)
    assert gap == 0.0


def test_interpolation_gap_is_finite_and_nonnegative():
    gap = fpr_interpolation_gap(12, 30, 0.25, CovModel.tridiag(0.3),
                                gen_gaussian, reps=4, rng=18)
    assert gap >= 0.0
    assert math.isfinite(gap)


def test_interpolation_gap_domain():
    with pytest.raises(ValueError, match="rate must lie"):
        fpr_interpolation_gap(10, 20, 1.5, CovModel.tridiag(0.3),
                              gen_gaussian, reps=2)
    with pytest.raises(ValueError, match="replication"):
        fpr_interpolation_gap(10, 20, 0.25, CovModel.tridiag(0.3),
                              gen_gaussian, reps=0)


def test_sparsity_class_validation():
    SparsityClass(kappa=2, delta=0.1)
    with pytest.raises(ValueError, match="kappa"):
        SparsityClass(kappa=0, delta=0.1)
    with pytest.raises(ValueError, match="delta"):
        SparsityClass(kappa=1, delta=0.0)
