"""Seedable data generators and the replicated simulation harness.

Generators draw Gaussian, heavy-tailed (Gaussian scale-mixture), and
Rademacher samples with a prescribed covariance.  run_experiment fits a list
of methods over independent replications and aggregates false/true positive
percentages and optional operator-norm losses.  Replication r consumes only
its own RNG stream, derived from (seed, r), so thread count and replication
order never change a report.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baseline import CvConfig, cv_threshold, diagonal_estimator
from .calibrate import support_metrics
from .covmodel import CovModel, Sample, as_sample, empirical_cov, model_matrix
from .estimator import EstimatorConfig, FprRadius, sparse_estimate
from .linalg import check_sym, psd_sqrt, schatten_norm
from .threshold import ThresholdRule

DEFAULT_SEED = 1729


# ===== method descriptors ================================================


@dataclass(frozen=True)
class Calibrated:
    """Ball-constrained estimator calibrated to false positive rate rho."""

    rho: float = 0.05

    def describe(self):
        return f"calibrated({100.0 * self.rho:g}%)"


@dataclass(frozen=True)
class Baseline:
    """Cross-validated universal thresholding with the given rule."""

    rule: ThresholdRule

    def describe(self):
        return f"cv({self.rule.describe()})"


@dataclass(frozen=True)
class Diagonal:
    """Empirical diagonal covariance (off-diagonals zeroed)."""

    def describe(self):
        return "diagonal"


@dataclass(frozen=True)
class Empirical:
    """Raw empirical covariance, no shrinkage."""

    def describe(self):
        return "empirical"


# ===== generators ========================================================


def _gaussian_sampler(sigma):
    root = psd_sqrt(check_sym(sigma))

    def draw(n, rng):
        return Sample(rng.standard_normal((n, root.shape[0])) @ root)

    return draw


def _laplace_sampler(sigma):
    root = psd_sqrt(check_sym(sigma))

    def draw(n, rng):
        z = rng.standard_normal((n, root.shape[0])) @ root
        v = rng.exponential(1.0, size=n)
        return Sample(np.sqrt(v)[:, None] * z)

    return draw


def _rademacher_sampler(sigma):
    sigma = check_sym(sigma)
    if not np.allclose(np.diag(sigma), 1.0, rtol=0.0, atol=1e-8):
        raise ValueError("Rademacher target covariance must have unit diagonal")
    # latent Gaussian correlation sin(pi/2 * sigma): the sign covariance
    # (2/pi) * arcsin recovers sigma exactly (arcsine identity)
    latent = np.sin(np.pi / 2.0 * sigma)
    root = psd_sqrt(latent)

    def draw(n, rng):
        z = rng.standard_normal((n, root.shape[0])) @ root
        return Sample(np.where(z >= 0.0, 1.0, -1.0))

    return draw


_SAMPLERS = {
    "gaussian": _gaussian_sampler,
    "laplace": _laplace_sampler,
    "rademacher": _rademacher_sampler,
}


def gen_gaussian(sigma, n, rng):
    """n iid rows from N(0, sigma), drawn as standard normals times the PSD root."""
    return _gaussian_sampler(sigma)(n, rng)


def gen_laplace(sigma, n, rng):
    """Gaussian scale mixture with per-row Exp(1) variance: heavy tails, covariance sigma."""
    return _laplace_sampler(sigma)(n, rng)


def gen_rademacher(sigma, n, rng):
    """Entrywise +-1 sample whose sign covariance matches the unit-diagonal sigma."""
    return _rademacher_sampler(sigma)(n, rng)


# ===== experiment harness ================================================


@dataclass(frozen=True, eq=False)
class ExperimentSpec:
    """One simulation design: distribution, truth model, sizes, methods, seed."""

    distribution: str
    model: CovModel
    n: int
    d: int
    reps: int
    methods: tuple
    seed: int = DEFAULT_SEED
    loss_report: bool = False

    def __post_init__(self):
        if self.distribution not in _SAMPLERS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.n < 2 or self.d < 1:
            raise ValueError(f"need n >= 2 and d >= 1, got n={self.n}, d={self.d}")
        if self.reps < 1:
            raise ValueError(f"need at least one replication, got {self.reps}")
        methods = tuple(self.methods)
        if not methods:
            raise ValueError("need at least one method")
        if any(isinstance(m, Baseline) for m in methods) and self.n < 4:
            raise ValueError("cross-validated baselines need n >= 4")
        object.__setattr__(self, "methods", methods)


@dataclass(frozen=True)
class MethodSummary:
    """Replication means and standard deviations for one method (percent scale)."""

    label: str
    fp_mean: float
    fp_sd: float
    tp_mean: float
    tp_sd: float
    loss_mean: float = None
    loss_sd: float = None


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    """Aggregated experiment output: one summary per method, plus timing."""

    spec: ExperimentSpec
    methods: tuple
    wall_clock: float


def _fit_method(method, sample, sigma_true, rng, loss_report):
    if isinstance(method, Calibrated):
        config = EstimatorConfig(radius_source=FprRadius(method.rho))
        est = sparse_estimate(empirical_cov(sample), config).matrix
    elif isinstance(method, Baseline):
        _, est = cv_threshold(sample, CvConfig(rule=method.rule), rng)
    elif isinstance(method, Diagonal):
        est = diagonal_estimator(sample)
    elif isinstance(method, Empirical):
        est = empirical_cov(sample)
    else:
        raise ValueError(f"unknown method descriptor {method!r}")
    sm = support_metrics(est, sigma_true, 0.0)
    loss = schatten_norm(est - sigma_true, math.inf) if loss_report else math.nan
    return 100.0 * sm.false_positive_rate, 100.0 * sm.true_positive_rate, loss


def run_experiment(spec, threads=1):
    """Run all replications of an experiment and aggregate per-method statistics.

    threads > 1 distributes replications over a thread pool; results are
    written into per-replication slots, so the report is identical for every
    thread count.
    """
    t0 = time.perf_counter()
    sigma = model_matrix(spec.model, spec.d)
    sampler = _SAMPLERS[spec.distribution](sigma)
    streams = np.random.SeedSequence(spec.seed).spawn(spec.reps)
    results = np.empty((spec.reps, len(spec.methods), 3))

    def one_rep(r):
        try:
            children = streams[r].spawn(1 + len(spec.methods))
            sample = sampler(spec.n, np.random.default_rng(children[0]))
            for j, method in enumerate(spec.methods):
                rng = np.random.default_rng(children[1 + j])
                results[r, j] = _fit_method(method, sample, sigma, rng,
                                            spec.loss_report)
        except Exception as exc:
            raise RuntimeError(f"replication {r} failed: {exc}") from exc

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(one_rep, range(spec.reps)))
    else:
        for r in range(spec.reps):
            one_rep(r)

    ddof = 1 if spec.reps > 1 else 0
    summaries = []
    for j, method in enumerate(spec.methods):
        fp, tp, loss = results[:, j, 0], results[:, j, 1], results[:, j, 2]
        summaries.append(MethodSummary(
            label=method.describe(),
            fp_mean=float(fp.mean()),
            fp_sd=float(fp.std(ddof=ddof)),
            tp_mean=float(tp.mean()),
            tp_sd=float(tp.std(ddof=ddof)),
            loss_mean=float(loss.mean()) if spec.loss_report else None,
            loss_sd=float(loss.std(ddof=ddof)) if spec.loss_report else None,
        ))
    return ExperimentReport(spec=spec, methods=tuple(summaries),
                            wall_clock=time.perf_counter() - t0)


# ===== random-matrix diagnostic ==========================================


def symmetrization_scan(d, rho_grid, reps, rng=0):
    """Mean operator norm of a masked, sign-flipped random symmetric matrix.

    For each density rho: off-diagonal entries iid Uniform(-1,1), kept by an
    independent Bernoulli(rho) mask and flipped by independent Rademacher
    signs, all symmetric with zero diagonal.  Returns a list of
    (rho, mean operator norm) rows.
    """
    if reps < 1:
        raise ValueError(f"need at least one replication, got {reps}")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    iu = np.triu_indices(d, 1)
    n_pairs = iu[0].size
    scratch = np.zeros((d, d))
    rows = []
    for rho in np.asarray(rho_grid, dtype=float):
        if not 0.0 <= rho <= 1.0:
            raise ValueError(f"density must lie in [0, 1], got {rho}")
        total = 0.0
        for _ in range(reps):
            vals = rng.uniform(-1.0, 1.0, n_pairs)
            vals *= rng.random(n_pairs) < rho
            vals *= rng.integers(0, 2, n_pairs) * 2.0 - 1.0
            scratch[iu] = vals
            scratch[(iu[1], iu[0])] = vals
            total += schatten_norm(scratch, math.inf)
        rows.append((float(rho), total / reps))
    return rows


# ===== variance-ratio ranking ============================================


def fstat_rank(data, labels):
    """Rank variables by the one-way F statistic across labeled classes.

    F = between-class mean square over within-class mean square, with class
    variances on divisor n_m - 1.  Returns (indices, f_values) sorted by
    descending F; ties keep ascending variable index.
    """
    s = as_sample(data)
    y = np.asarray(labels)
    if y.ndim != 1 or y.size != s.n:
        raise ValueError(
            f"labels must be a length-{s.n} vector, got shape {y.shape}")
    classes, inverse = np.unique(y, return_inverse=True)
    k = classes.size
    if k < 2:
        raise ValueError(f"need at least 2 classes, got {k}")
    counts = np.bincount(inverse)
    if counts.min() < 2:
        small = classes[int(np.argmin(counts))]
        raise ValueError(f"class {small!r} has fewer than 2 observations")
    grand = s.data.mean(axis=0)
    between = np.zeros(s.d)
    within = np.zeros(s.d)
    for m in range(k):
        block = s.data[inverse == m]
        between += counts[m] * (block.mean(axis=0) - grand) ** 2
        within += (counts[m] - 1) * block.var(axis=0, ddof=1)
    between /= k - 1
    within /= s.n - k
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(within > 0.0, between / within,
                     np.where(between > 0.0, np.inf, 0.0))
    order = np.argsort(-f, kind="stable")
    return order, f[order]
