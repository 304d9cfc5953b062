"""Dense symmetric matrix primitives.

Eigendecomposition, Schatten and entrywise norms, the PSD square root, and
cheap operator-norm bounds.  Everything downstream is built on these.
"""

import math
from dataclasses import dataclass

import numpy as np


class NotPsdError(ValueError):
    """Raised when a matrix required to be positive semi-definite is not."""


def symmetrize(m):
    """Average a nearly-symmetric matrix with its transpose.

    (m + m.T)/2 is exactly symmetric in floating point, so construction
    sites can use this to enforce the symmetry invariant.
    """
    m = np.asarray(m, dtype=float)
    return (m + m.T) / 2.0


def check_sym(m, name="matrix"):
    """Validate a dense symmetric matrix and return it as a float array."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    if not np.array_equal(m, m.T):
        raise ValueError(f"{name} is not symmetric")
    return m


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Eigendecomposition of a symmetric matrix.

    values are sorted non-increasing; vectors[:, i] is the unit eigenvector
    paired with values[i], so vectors @ diag(values) @ vectors.T reconstructs
    the input.
    """

    values: np.ndarray
    vectors: np.ndarray


def sym_eigen(m):
    """Full eigendecomposition of a symmetric matrix, eigenvalues descending."""
    m = check_sym(m)
    vals, vecs = np.linalg.eigh(m)
    # eigh returns ascending order; flip to descending
    return EigenPair(values=np.ascontiguousarray(vals[::-1]),
                     vectors=np.ascontiguousarray(vecs[:, ::-1]))


def _check_exponent(p, name="p"):
    if not (math.isinf(p) or p >= 1.0):
        raise ValueError(f"{name} must satisfy {name} >= 1 or {name} = inf, got {p}")


def _singular_values(m):
    # symmetric inputs: singular values are absolute eigenvalues;
    # rectangular inputs: eigenvalues of the smaller Gram matrix, clamped at 0
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    if m.shape[0] == m.shape[1] and np.array_equal(m, m.T):
        return np.abs(np.linalg.eigvalsh(m))
    gram = m @ m.T if m.shape[0] <= m.shape[1] else m.T @ m
    gram = symmetrize(gram)
    return np.sqrt(np.clip(np.linalg.eigvalsh(gram), 0.0, None))


def schatten_norm(m, p):
    """p-Schatten norm: the l^p norm of the singular values.

    p=1 is the trace norm, p=2 the Frobenius norm, p=inf the operator norm.
    """
    _check_exponent(p)
    sv = _singular_values(m)
    if math.isinf(p):
        return float(sv.max())
    return float(np.sum(sv ** p) ** (1.0 / p))


def entrywise_norm(m, p, q):
    """(p,q)-entrywise norm: outer l^p norm over rows of inner l^q row norms."""
    _check_exponent(p, "p")
    _check_exponent(q, "q")
    a = np.abs(np.asarray(m, dtype=float))
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    rows = a.max(axis=1) if math.isinf(q) else (a ** q).sum(axis=1) ** (1.0 / q)
    if math.isinf(p):
        return float(rows.max())
    return float((rows ** p).sum() ** (1.0 / p))


def psd_sqrt(m):
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues within -1e-10 (relative) of zero are clamped to zero; anything
    more negative raises NotPsdError.
    """
    m = check_sym(m)
    vals, vecs = np.linalg.eigh(m)
    tol = 1e-10 * max(float(vals[-1]), 0.0)
    if float(vals[0]) < -tol:
        raise NotPsdError(f"matrix is not PSD: min eigenvalue {vals[0]:.6g}")
    root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
    return symmetrize(root)


def opnorm_bounds(m):
    """Cheap (lower, upper) bracket for the operator norm of a symmetric matrix.

    lower = max column l2 norm (the norm of M e_j); upper = max column l1 norm
    (Gershgorin disc bound).
    """
    m = check_sym(m)
    lower = float(np.sqrt((m * m).sum(axis=0).max()))
    upper = float(np.abs(m).sum(axis=0).max())
    return lower, upper
