"""Empirical covariance, correlation normalization, and ground-truth models.

The estimator pipeline runs on the correlation scale (unit diagonal) and
rescales at the end, so to_correlation carries the scale vector alongside the
normalized matrix.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import check_sym, symmetrize


class SampleSizeError(ValueError):
    """Raised when a sample has too few observations for the requested task."""


class DegenerateVariableError(ValueError):
    """Raised when a variable has nonpositive variance; carries the 0-based index."""

    def __init__(self, index, value):
        self.index = int(index)
        self.value = float(value)
        super().__init__(
            f"variable {self.index} has nonpositive variance {self.value:.6g}")


@dataclass(frozen=True, eq=False)
class Sample:
    """An n x d data matrix, rows are observations."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise ValueError(f"sample data must be 2-d, got shape {data.shape}")
        if data.shape[0] < 2:
            raise SampleSizeError(f"need at least 2 observations, got {data.shape[0]}")
        if data.shape[1] < 1:
            raise ValueError("need at least one variable")
        if not np.all(np.isfinite(data)):
            raise ValueError("sample contains non-finite entries")
        object.__setattr__(self, "data", data)

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def d(self):
        return self.data.shape[1]


def as_sample(s):
    """Coerce an array-like or Sample into a Sample."""
    return s if isinstance(s, Sample) else Sample(np.asarray(s, dtype=float))


@dataclass(frozen=True, eq=False)
class CovModel:
    """Ground-truth covariance model.

    kind "ar": entries rho^|i-j|; kind "ma"/"tridiag": unit diagonal with rho
    on the first off-diagonals (two names for the same matrix, kept because
    both framings are in common use); kind "custom": an explicit matrix.
    """

    kind: str
    rho: float = 0.0
    matrix: np.ndarray = None

    def __post_init__(self):
        if self.kind not in ("ar", "ma", "tridiag", "custom"):
            raise ValueError(f"unknown covariance model kind {self.kind!r}")
        if self.kind == "custom":
            if self.matrix is None:
                raise ValueError("custom model requires a matrix")
            object.__setattr__(self, "matrix", check_sym(self.matrix, "custom model"))
        elif not -1.0 < self.rho < 1.0:
            raise ValueError(f"model parameter must lie in (-1, 1), got {self.rho}")

    @classmethod
    def ar(cls, rho):
        return cls(kind="ar", rho=float(rho))

    @classmethod
    def ma(cls, rho):
        return cls(kind="ma", rho=float(rho))

    @classmethod
    def tridiag(cls, rho):
        return cls(kind="tridiag", rho=float(rho))

    @classmethod
    def custom(cls, matrix):
        return cls(kind="custom", matrix=matrix)

    def describe(self):
        if self.kind == "custom":
            return f"custom({self.matrix.shape[0]}x{self.matrix.shape[1]})"
        return f"{self.kind}({self.rho:g})"


def model_matrix(model, d):
    """Materialize a covariance model as a d x d matrix, validated PSD."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    if model.kind == "custom":
        if model.matrix.shape[0] != d:
            raise ValueError(
                f"custom model is {model.matrix.shape[0]}x{model.matrix.shape[0]}, "
                f"requested d={d}")
        sigma = model.matrix.copy()
    elif model.kind == "ar":
        idx = np.arange(d)
        sigma = model.rho ** np.abs(np.subtract.outer(idx, idx)).astype(float)
    else:
        # ma / tridiag: unit diagonal, rho on the first off-diagonals
        sigma = np.eye(d)
        if d > 1:
            off = np.full(d - 1, model.rho)
            sigma += np.diag(off, 1) + np.diag(off, -1)
    sigma = symmetrize(sigma)
    eigs = np.linalg.eigvalsh(sigma)
    if float(eigs[0]) < -1e-10 * max(float(eigs[-1]), 1e-300):
        raise ValueError(
            f"model {model.describe()} is not PSD at d={d}: "
            f"min eigenvalue {eigs[0]:.6g}")
    return sigma


def empirical_cov(s):
    """Empirical covariance with divisor n (not n-1), rows centered at the mean."""
    s = as_sample(s)
    centered = s.data - s.data.mean(axis=0)
    return symmetrize(centered.T @ centered / s.n)


def to_correlation(m):
    """Normalize a covariance matrix to unit diagonal.

    Returns (corr, scale) with scale[i] = sqrt(m[i][i]), so that
    diag(scale) @ corr @ diag(scale) reconstructs m.
    """
    m = check_sym(m)
    diag = np.diag(m)
    bad = np.flatnonzero(diag <= 0.0)
    if bad.size:
        raise DegenerateVariableError(bad[0], diag[bad[0]])
    scale = np.sqrt(diag)
    corr = m / np.outer(scale, scale)
    np.fill_diagonal(corr, 1.0)
    return symmetrize(corr), scale
