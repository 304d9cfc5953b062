"""Coverage level to confidence-ball radius maps under three tail regimes.

Each regime carries one positive constant: log-concave curvature c,
sub-exponential scale K, or entrywise bound U.  The maps are exact inverses
of each other.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Regime:
    """Distributional tail regime with its concentration constant."""

    kind: str
    const: float

    def __post_init__(self):
        if self.kind not in ("logconcave", "subexp", "bounded"):
            raise ValueError(f"unknown regime {self.kind!r}")
        if not self.const > 0.0:
            raise ValueError(f"regime constant must be positive, got {self.const}")

    @classmethod
    def log_concave(cls, c=1.0):
        """Strongly log-concave density with curvature constant c."""
        return cls(kind="logconcave", const=float(c))

    @classmethod
    def sub_exponential(cls, k=1.0):
        """Sub-exponential (spectral-gap) regime with scale K."""
        return cls(kind="subexp", const=float(k))

    @classmethod
    def bounded(cls, u=1.0):
        """Entries bounded in magnitude by U."""
        return cls(kind="bounded", const=float(u))

    @classmethod
    def gaussian(cls, lambda_max):
        """Gaussian convenience constructor: curvature is 1 / (max eigenvalue)."""
        if not lambda_max > 0.0:
            raise ValueError(f"max eigenvalue must be positive, got {lambda_max}")
        return cls.log_concave(1.0 / float(lambda_max))

    def describe(self):
        return f"{self.kind}({self.const:g})"


def radius_from_alpha(regime, n, alpha):
    """Ball radius achieving coverage level alpha for a sample of size n."""
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    t = -math.log(alpha)
    c = regime.const
    if regime.kind == "logconcave":
        return math.sqrt(2.0 * t / (n * c))
    if regime.kind == "subexp":
        return max(c * t / math.sqrt(n), math.sqrt(c * t))
    return c * math.sqrt(t / (2.0 * n))


def alpha_from_radius(regime, n, r):
    """Inverse of radius_from_alpha: the coverage level a given radius certifies."""
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    if not r > 0.0:
        raise ValueError(f"radius must be positive, got {r}")
    c = regime.const
    if regime.kind == "logconcave":
        return math.exp(-n * c * r * r / 2.0)
    if regime.kind == "subexp":
        # the two branches of the forward map cross at r = sqrt(n)
        t = r * math.sqrt(n) / c if r >= math.sqrt(n) else r * r / c
        return math.exp(-t)
    return math.exp(-2.0 * n * r * r / (c * c))
