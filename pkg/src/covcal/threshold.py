"""Generalized thresholding operators applied entrywise to off-diagonal entries.

Every rule acts on the magnitude |z| and restores the sign, satisfies the
shrinkage contract |s(z)| <= |z|, s(z) = 0 for |z| <= lam, |s(z) - z| <= lam,
and keeps entries with |z| exactly equal to lam (hard rule boundary).
"""

from dataclasses import dataclass

import numpy as np

from .linalg import check_sym


@dataclass(frozen=True)
class ThresholdRule:
    """Tagged shrinkage rule: hard, soft, scad(a), or adaptive(eta).

    a is the scad concavity parameter (a > 2, default 3.7); eta is the
    adaptive-lasso exponent (eta >= 0, default 1; eta = 0 reduces to soft).
    """

    kind: str
    a: float = 3.7
    eta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("hard", "soft", "scad", "adaptive"):
            raise ValueError(f"unknown threshold rule {self.kind!r}")
        if self.kind == "scad" and not self.a > 2.0:
            raise ValueError(f"scad requires a > 2, got {self.a}")
        if self.kind == "adaptive" and not self.eta >= 0.0:
            raise ValueError(f"adaptive lasso requires eta >= 0, got {self.eta}")

    @classmethod
    def hard(cls):
        return cls(kind="hard")

    @classmethod
    def soft(cls):
        return cls(kind="soft")

    @classmethod
    def scad(cls, a=3.7):
        return cls(kind="scad", a=float(a))

    @classmethod
    def adaptive(cls, eta=1.0):
        return cls(kind="adaptive", eta=float(eta))

    def describe(self):
        if self.kind == "scad":
            return f"scad({self.a:g})"
        if self.kind == "adaptive":
            return f"adaptive({self.eta:g})"
        return self.kind


def _shrink_magnitudes(rule, az, lam):
    # az = |z| (array), lam >= 0; returns the shrunk magnitudes
    if rule.kind == "hard":
        return np.where(az >= lam, az, 0.0)
    if rule.kind == "soft":
        return np.maximum(az - lam, 0.0)
    if rule.kind == "scad":
        a = rule.a
        # soft below 2*lam, linear interpolation to the identity on [2*lam, a*lam]
        return np.where(
            az <= 2.0 * lam,
            np.maximum(az - lam, 0.0),
            np.where(az <= a * lam, ((a - 1.0) * az - a * lam) / (a - 2.0), az),
        )
    # adaptive lasso: penalty lam^(eta+1) / |z|^eta, zero kept at zero
    eta = rule.eta
    with np.errstate(divide="ignore", invalid="ignore"):
        pen = np.where(az > 0.0, lam ** (eta + 1.0) * az ** (-eta), 0.0)
    return np.maximum(az - pen, 0.0)


def shrink(rule, z, lam):
    """Apply a shrinkage rule to a scalar entry."""
    if lam < 0.0:
        raise ValueError(f"threshold must be nonnegative, got {lam}")
    az = np.abs(np.float64(z))
    return float(np.sign(z) * _shrink_magnitudes(rule, az, float(lam)))


def apply_threshold(m, rule, lam):
    """Shrink all off-diagonal entries of a symmetric matrix; diagonal passes through."""
    m = check_sym(m)
    if lam < 0.0:
        raise ValueError(f"threshold must be nonnegative, got {lam}")
    out = np.sign(m) * _shrink_magnitudes(rule, np.abs(m), float(lam))
    np.fill_diagonal(out, np.diag(m))
    return out
