"""Coverage-level to radius maps: hand values, inversion, monotonicity."""

import math

import numpy as np
import pytest

from covcal import Regime, alpha_from_radius, radius_from_alpha


def test_regime_validation_and_labels():
    with pytest.raises(ValueError, match="unknown regime"):
        Regime(kind="heavy", const=1.0)
    with pytest.raises(ValueError, match="positive"):
        Regime.log_concave(0.0)
    with pytest.raises(ValueError, match="positive"):
        Regime.gaussian(-1.0)
    assert Regime.sub_exponential(2.0).describe() == "subexp(2)"


def test_gaussian_constructor_inverts_the_largest_eigenvalue():
    regime = Regime.gaussian(2.0)
    assert regime.kind == "logconcave"
    assert regime.const == 0.5


def test_log_concave_hand_value():
    # c=1, n=100, alpha=e^-2: r = sqrt(2*2 / 100) = 0.2
    r = radius_from_alpha(Regime.log_concave(1.0), 100, math.exp(-2.0))
    assert r == pytest.approx(0.2)


def test_bounded_hand_value():
    # U=2, n=50, alpha=e^-1: r = 2 * sqrt(1 / 100) = 0.2
    r = radius_from_alpha(Regime.bounded(2.0), 50, math.exp(-1.0))
    assert r == pytest.approx(0.2)


def test_sub_exponential_branches():
    regime = Regime.sub_exponential(1.0)
    # small deviation branch: sqrt(t) wins while t <= n
    assert radius_from_alpha(regime, 100, math.exp(-4.0)) == pytest.approx(2.0)
    # large deviation branch: t/sqrt(n) wins once t > n
    assert radius_from_alpha(regime, 4, math.exp(-9.0)) == pytest.approx(4.5)
    # the branches agree at t = n
    assert radius_from_alpha(regime, 4, math.exp(-4.0)) == pytest.approx(2.0)


@pytest.mark.parametrize("regime", [
    Regime.log_concave(0.7),
    Regime.sub_exponential(1.3),
    Regime.bounded(2.5),
], ids=lambda r: r.kind)
def test_round_trip_alpha_radius_alpha(regime):
    for n in (5, 50, 500):
        for alpha in (1e-6, 1e-3, 0.05, 0.5, 0.99):
            r = radius_from_alpha(regime, n, alpha)
            back = alpha_from_radius(regime, n, r)
            assert back == pytest.approx(alpha, rel=1e-10)


@pytest.mark.parametrize("regime", [
    Regime.log_concave(0.7),
    Regime.sub_exponential(1.3),
    Regime.bounded(2.5),
], ids=lambda r: r.kind)
def test_round_trip_radius_alpha_radius(regime):
    for n in (5, 50, 500):
        for r in (1e-3, 0.1, 1.0, 10.0, 100.0):
            alpha = alpha_from_radius(regime, n, r)
            if alpha <= 0.0:  # level underflowed for an enormous radius
                continue
            back = radius_from_alpha(regime, n, alpha)
            assert back == pytest.approx(r, rel=1e-10)


@pytest.mark.parametrize("regime", [
    Regime.log_concave(1.0),
    Regime.sub_exponential(1.0),
    Regime.bounded(1.0),
], ids=lambda r: r.kind)
def test_radius_monotone_in_alpha_and_n(regime):
    alphas = np.linspace(0.01, 0.99, 25)
    radii = [radius_from_alpha(regime, 50, a) for a in alphas]
    assert np.all(np.diff(radii) < 0.0)  # stricter target -> larger ball
    ns = [2, 5, 10, 100, 1000]
    radii_n = [radius_from_alpha(regime, n, 0.05) for n in ns]
    assert np.all(np.diff(radii_n) <= 0.0)  # more data -> no larger ball


def test_alpha_from_radius_decreases_in_the_radius():
    for regime in (Regime.log_concave(1.0), Regime.sub_exponential(1.0),
                   Regime.bounded(1.0)):
        rs = np.linspace(0.05, 2.0, 40)
        alphas = [alpha_from_radius(regime, 30, r) for r in rs]
        assert np.all(np.diff(alphas) < 0.0)


def test_domain_errors():
    regime = Regime.log_concave(1.0)
    with pytest.raises(ValueError, match="sample size"):
        radius_from_alpha(regime, 0, 0.1)
    with pytest.raises(ValueError, match="alpha"):
        radius_from_alpha(regime, 10, 1.0)
    with pytest.raises(ValueError, match="alpha"):
        radius_from_alpha(regime, 10, 0.0)
    with pytest.raises(ValueError, match="radius"):
        alpha_from_radius(regime, 10, 0.0)
