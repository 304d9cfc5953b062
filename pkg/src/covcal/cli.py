"""Command-line front end.

Four subcommands: estimate a sparse covariance matrix from a CSV sample,
simulate replicated support-recovery experiments from a key=value spec file,
rank variables by F statistic and estimate on the selected block, and run the
calibration diagnostics.  Reports are written as CSV plus versioned JSON;
identical inputs and seed produce byte-identical JSON.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from .calibrate import _interpolation_terms
from .concentration import Regime
from .covmodel import (
    CovModel,
    DegenerateVariableError,
    Sample,
    empirical_cov,
)
from .estimator import (
    AlphaRadius,
    EstimatorConfig,
    FprRadius,
    Metric,
    psd_repair,
    shift_gamma,
    sparse_estimate,
)
from .simharness import (
    DEFAULT_SEED,
    Baseline,
    Calibrated,
    Diagonal,
    Empirical,
    ExperimentSpec,
    fstat_rank,
    gen_gaussian,
    run_experiment,
    symmetrization_scan,
)
from .threshold import ThresholdRule

SCHEMA = "covcal-report-v1"

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DEGENERATE = 3
EXIT_FLAGS = 4


class CliError(Exception):
    """Failure with a dedicated process exit code."""

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# ===== file plumbing =====================================================


def _read_numeric_csv(path):
    """Read a CSV of numbers; returns (array, names or None).

    Rows are observations, columns variables.  A single leading header row is
    auto-detected by failing to parse as numbers.  Raises CliError(2) naming
    the offending file line on any malformed content.
    """
    try:
        with open(path, newline="") as fh:
            raw = [(lineno, line) for lineno, line in enumerate(fh, 1)
                   if line.strip()]
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc}") from exc
    if not raw:
        raise CliError(EXIT_PARSE, f"{path}: no data rows")

    def parse_row(line):
        cells = [c.strip() for c in line.rstrip("\n").split(",")]
        try:
            values = [float(c) for c in cells]
        except ValueError:
            return cells, None
        return cells, values

    names = None
    start = 0
    cells, values = parse_row(raw[0][1])
    if values is None:
        names = cells
        start = 1
        if not raw[start:]:
            raise CliError(EXIT_PARSE, f"{path}: header but no data rows")
    rows = []
    width = None
    for lineno, line in raw[start:]:
        cells, values = parse_row(line)
        if values is None or not all(math.isfinite(v) for v in values):
            raise CliError(EXIT_PARSE, f"{path}: malformed row at line {lineno}")
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise CliError(
                EXIT_PARSE,
                f"{path}: row at line {lineno} has {len(values)} fields, "
                f"expected {width}")
        rows.append(values)
    if names is not None and len(names) != width:
        raise CliError(
            EXIT_PARSE,
            f"{path}: header has {len(names)} fields, data rows have {width}")
    return np.asarray(rows, dtype=float), names


def _write_matrix_csv(path, matrix, names=None):
    # %.17g keeps every float bit, so re-reading reproduces the matrix exactly
    with open(path, "w", newline="") as fh:
        if names is not None:
            fh.write(",".join(names) + "\n")
        for row in np.asarray(matrix):
            # v + 0.0 folds negative zero into plain zero
            fh.write(",".join(f"{v + 0.0:.17g}" for v in row) + "\n")


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ===== flag parsing helpers ==============================================


_RULES = {
    "hard": ThresholdRule.hard,
    "soft": ThresholdRule.soft,
    "scad": ThresholdRule.scad,
    "adaptive": ThresholdRule.adaptive,
}


def _parse_rule(token):
    try:
        return _RULES[token]()
    except KeyError:
        raise CliError(EXIT_FLAGS, f"unknown threshold rule {token!r}") from None


def _parse_metric(token):
    if token == "op":
        return Metric.operator_norm()
    if token == "fro":
        return Metric.frobenius()
    if token.startswith("entrywise:"):
        parts = token.split(":")
        if len(parts) == 3:
            try:
                return Metric.entrywise(float(parts[1]), float(parts[2]))
            except ValueError:
                pass
    raise CliError(
        EXIT_FLAGS,
        f"metric must be op, fro, or entrywise:p:q, got {token!r}")


def _radius_source(args, n):
    if args.rho is not None and args.alpha is not None:
        raise CliError(EXIT_FLAGS, "--rho and --alpha are mutually exclusive")
    if args.rho is not None:
        if args.regime is not None:
            raise CliError(EXIT_FLAGS, "--regime applies only with --alpha")
        try:
            return FprRadius(args.rho)
        except ValueError as exc:
            raise CliError(EXIT_FLAGS, str(exc)) from exc
    if args.alpha is None:
        raise CliError(EXIT_FLAGS, "one of --rho or --alpha is required")
    if args.regime is None:
        raise CliError(EXIT_FLAGS, "--alpha requires --regime")
    try:
        if args.regime == "logconcave":
            regime = Regime.log_concave(args.c)
        elif args.regime == "subexp":
            regime = Regime.sub_exponential(args.K)
        else:
            regime = Regime.bounded(args.U)
        return AlphaRadius(regime, args.alpha, n)
    except ValueError as exc:
        raise CliError(EXIT_FLAGS, str(exc)) from exc


def _column_label(index, names):
    # 1-indexed in every user-facing message
    if names is not None and 0 <= index < len(names):
        return f"column {index + 1} ({names[index]})"
    return f"column {index + 1}"


# ===== estimate ==========================================================


def cmd_estimate(args):
    data, names = _read_numeric_csv(args.input)
    if data.ndim != 2 or data.shape[0] < 2:
        raise CliError(EXIT_PARSE,
                       f"{args.input}: need at least 2 observation rows")
    sample = Sample(data)
    source = _radius_source(args, sample.n)
    config = EstimatorConfig(
        radius_source=source,
        rule=_parse_rule(args.rule),
        metric=_parse_metric(args.metric),
        iterations=args.iters,
    )
    try:
        est = sparse_estimate(empirical_cov(sample), config)
    except DegenerateVariableError as exc:
        raise CliError(
            EXIT_DEGENERATE,
            f"{args.input}: {_column_label(exc.index, names)} has nonpositive "
            f"variance {exc.value:g}") from exc

    matrix = est.matrix
    psd = None
    if args.psd != "none":
        gamma = shift_gamma(matrix, 1e-8) if args.psd == "shift" else None
        matrix = psd_repair(matrix, args.psd, 1e-8)
        psd = {"mode": args.psd}
        if gamma is not None:
            psd["gamma"] = gamma

    report = {
        "schema": SCHEMA,
        "command": "estimate",
        "input": args.input,
        "n": sample.n,
        "d": sample.d,
        "seed": args.seed,
        "rule": config.rule.describe(),
        "metric": config.metric.describe(),
        "iterations": config.iterations,
        "rho": args.rho,
        "alpha": args.alpha,
        "regime": None if args.regime is None else args.regime,
        "radius": est.radius,
        "lambda_star": est.lambda_star,
        "fpr_target": None if est.target is None else
            {"a": est.target.a, "eta": est.target.eta, "rho": est.target.rho},
        "support_size": len(est.support),
        "support": sorted([i + 1, j + 1] for i, j in est.support),
        "psd": psd,
    }
    _write_matrix_csv(args.output_prefix + ".matrix.csv", matrix, names)
    _write_json(args.output_prefix + ".report.json", report)
    return EXIT_OK


# ===== simulate ==========================================================


_MODELS = {"ar": CovModel.ar, "ma": CovModel.ma, "tridiag": CovModel.tridiag}


def _parse_method_token(token):
    token = token.strip()
    if token == "diagonal":
        return Diagonal()
    if token == "empirical":
        return Empirical()
    kind, sep, arg = token.partition(":")
    if kind == "calibrated" and sep:
        try:
            return Calibrated(float(arg))
        except ValueError:
            raise CliError(EXIT_PARSE,
                           f"bad calibrated level in {token!r}") from None
    if kind == "cv" and sep and arg in _RULES:
        return Baseline(_RULES[arg]())
    raise CliError(EXIT_PARSE, f"unknown method {token!r}")


def _parse_spec_file(path):
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc}") from exc
    settings = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise CliError(EXIT_PARSE,
                           f"{path}:{lineno}: expected key = value")
        settings[key.strip().lower()] = (lineno, value.strip())

    def take(key, default=None):
        if key in settings:
            return settings.pop(key)[1]
        if default is None:
            raise CliError(EXIT_PARSE, f"{path}: missing required key {key!r}")
        return default

    def as_int(key, text):
        try:
            return int(text)
        except ValueError:
            raise CliError(EXIT_PARSE,
                           f"{path}: {key} must be an integer, "
                           f"got {text!r}") from None

    distribution = take("distribution").lower()
    if distribution not in ("gaussian", "laplace", "rademacher"):
        raise CliError(EXIT_PARSE,
                       f"{path}: unknown distribution {distribution!r}")
    model_kind = take("model").lower()
    if model_kind not in _MODELS:
        raise CliError(EXIT_PARSE, f"{path}: unknown model {model_kind!r}")
    try:
        model = _MODELS[model_kind](float(take("model_rho")))
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"{path}: bad model_rho: {exc}") from exc
    n = as_int("n", take("n"))
    dims = [as_int("d", tok) for tok in take("d").split(",") if tok.strip()]
    if not dims:
        raise CliError(EXIT_PARSE, f"{path}: d must list at least one dimension")
    reps = as_int("reps", take("reps"))
    methods = tuple(_parse_method_token(tok)
                    for tok in take("methods").split(",") if tok.strip())
    if not methods:
        raise CliError(EXIT_PARSE, f"{path}: methods must list at least one method")
    loss_text = take("loss_report", "false").lower()
    if loss_text not in ("true", "false"):
        raise CliError(EXIT_PARSE,
                       f"{path}: loss_report must be true or false, "
                       f"got {loss_text!r}")
    seed = as_int("seed", take("seed", str(DEFAULT_SEED)))
    if settings:
        stray = sorted(settings)[0]
        lineno = settings[stray][0]
        raise CliError(EXIT_PARSE, f"{path}:{lineno}: unknown key {stray!r}")
    try:
        return [ExperimentSpec(distribution=distribution, model=model, n=n,
                               d=d, reps=reps, methods=methods, seed=seed,
                               loss_report=loss_text == "true")
                for d in dims]
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from exc


def _simulate_table_rows(specs, reports):
    dims = [spec.d for spec in specs]
    loss = specs[0].loss_report
    if loss:
        header = (["method"] + [f"loss_d{d}" for d in dims]
                  + [f"loss_sd_d{d}" for d in dims])
    else:
        header = (["method"] + [f"fp_pct_d{d}" for d in dims]
                  + [f"tp_pct_d{d}" for d in dims])
    rows = [header]
    for j, summary in enumerate(reports[0].methods):
        cells = [summary.label]
        if loss:
            cells += [f"{rep.methods[j].loss_mean:.6g}" for rep in reports]
            cells += [f"{rep.methods[j].loss_sd:.6g}" for rep in reports]
        else:
            cells += [f"{rep.methods[j].fp_mean:.6g}" for rep in reports]
            cells += [f"{rep.methods[j].tp_mean:.6g}" for rep in reports]
        rows.append(cells)
    return rows


def cmd_simulate(args):
    specs = _parse_spec_file(args.spec)
    reports = [run_experiment(spec, threads=args.threads) for spec in specs]

    rows = _simulate_table_rows(specs, reports)
    with open(args.output_prefix + ".table.csv", "w", newline="") as fh:
        for cells in rows:
            fh.write(",".join(cells) + "\n")

    base = specs[0]
    methods = []
    for j, summary in enumerate(reports[0].methods):
        per_d = {}
        for spec, rep in zip(specs, reports):
            s = rep.methods[j]
            entry = {"fp_mean": s.fp_mean, "fp_sd": s.fp_sd,
                     "tp_mean": s.tp_mean, "tp_sd": s.tp_sd}
            if base.loss_report:
                entry["loss_mean"] = s.loss_mean
                entry["loss_sd"] = s.loss_sd
            per_d[str(spec.d)] = entry
        methods.append({"label": summary.label, "per_d": per_d})
    report = {
        "schema": SCHEMA,
        "command": "simulate",
        "spec": args.spec,
        "distribution": base.distribution,
        "model": base.model.describe(),
        "n": base.n,
        "dimensions": [spec.d for spec in specs],
        "reps": base.reps,
        "seed": base.seed,
        "loss_report": base.loss_report,
        "methods": methods,
    }
    _write_json(args.output_prefix + ".report.json", report)
    return EXIT_OK


# ===== genes =============================================================


def _read_labels_csv(path):
    try:
        with open(path) as fh:
            raw = [(lineno, line.strip()) for lineno, line in enumerate(fh, 1)
                   if line.strip()]
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc}") from exc
    if not raw:
        raise CliError(EXIT_PARSE, f"{path}: no labels")
    labels = [line.split(",")[0].strip() for _, line in raw]
    # optional single header cell, detected the same way as data headers
    return labels


def _block_nonzero_pct(support, block_a, block_b):
    a, b = set(block_a), set(block_b)
    if a == b:
        total = len(a) * (len(a) - 1) // 2
        hits = sum(1 for i, j in support if i in a and j in a)
    else:
        total = len(a) * len(b)
        hits = sum(1 for i, j in support
                   if (i in a and j in b) or (i in b and j in a))
    return 100.0 * hits / total if total else 0.0


def cmd_genes(args):
    if args.top < 2 or args.bottom < 2:
        raise CliError(EXIT_FLAGS, "--top and --bottom must be at least 2")
    data, names = _read_numeric_csv(args.data)
    labels = _read_labels_csv(args.labels)
    if len(labels) == data.shape[0] + 1:
        labels = labels[1:]  # header cell on the label file
    if len(labels) != data.shape[0]:
        raise CliError(
            EXIT_PARSE,
            f"{args.labels}: {len(labels)} labels for {data.shape[0]} "
            f"data rows")
    if data.shape[0] < 4:
        raise CliError(EXIT_PARSE, f"{args.data}: need at least 4 observations")
    sample = Sample(data)
    if args.top + args.bottom > sample.d:
        raise CliError(
            EXIT_PARSE,
            f"--top {args.top} + --bottom {args.bottom} exceeds the "
            f"{sample.d} available variables")
    try:
        order, fvals = fstat_rank(sample, labels)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"{args.labels}: {exc}") from exc

    selected = np.concatenate([order[:args.top], order[-args.bottom:]])
    block = Sample(sample.data[:, selected])
    try:
        config = EstimatorConfig(radius_source=FprRadius(args.rho))
    except ValueError as exc:
        raise CliError(EXIT_FLAGS, str(exc)) from exc
    try:
        est = sparse_estimate(empirical_cov(block), config)
    except DegenerateVariableError as exc:
        original = int(selected[exc.index])
        raise CliError(
            EXIT_DEGENERATE,
            f"{args.data}: {_column_label(original, names)} has nonpositive "
            f"variance {exc.value:g}") from exc

    top_block = range(args.top)
    bottom_block = range(args.top, args.top + args.bottom)
    report = {
        "schema": SCHEMA,
        "command": "genes",
        "data": args.data,
        "labels": args.labels,
        "top": args.top,
        "bottom": args.bottom,
        "rho": args.rho,
        "radius": est.radius,
        "lambda_star": est.lambda_star,
        "support_size": len(est.support),
        "selected_variables": [int(v) + 1 for v in selected],
        "informative_nonzero_pct": _block_nonzero_pct(
            est.support, top_block, top_block),
        "uninformative_nonzero_pct": _block_nonzero_pct(
            est.support, bottom_block, bottom_block),
        "cross_nonzero_pct": _block_nonzero_pct(
            est.support, top_block, bottom_block),
    }
    with open(args.output_prefix + ".fstat.csv", "w", newline="") as fh:
        fh.write("rank,variable,f_value\n")
        for rank, (var, f) in enumerate(zip(order, fvals), 1):
            label = names[var] if names is not None else f"v{var + 1}"
            fh.write(f"{rank},{label},{f:.17g}\n")
    _write_json(args.output_prefix + ".report.json", report)
    return EXIT_OK


# ===== diagnostics =======================================================


def _parse_model_token(token):
    if token == "identity":
        return CovModel.tridiag(0.0)
    kind, sep, arg = token.partition(":")
    if sep and kind in _MODELS:
        try:
            return _MODELS[kind](float(arg))
        except ValueError:
            pass
    raise CliError(EXIT_FLAGS,
                   f"model must be identity or kind:rho, got {token!r}")


def cmd_diagnostics(args):
    if args.which == "interpolation":
        model = _parse_model_token(args.model)
        num, den, target = _interpolation_terms(
            args.d, args.n, args.rho, model, gen_gaussian, args.reps,
            rng=np.random.default_rng(args.seed))
        ratio = float(num.mean()) / float(den.mean())
        gap = abs(target.eta * ratio - target.rho)
        # delta-method standard error of the ratio of Monte Carlo means
        nm, dm = float(num.mean()), float(den.mean())
        var = (np.var(num, ddof=1) / dm ** 2
               + nm ** 2 * np.var(den, ddof=1) / dm ** 4
               - 2.0 * nm * np.cov(num, den, ddof=1)[0, 1] / dm ** 3
               ) / args.reps if args.reps > 1 else 0.0
        se = target.eta * math.sqrt(max(var, 0.0))
        print(f"interpolation gap: {gap:.6g} (se {se:.2g})  "
              f"[rho={target.rho:g} eta={target.eta:g} a={target.a} "
              f"d={args.d} n={args.n} reps={args.reps}]")
    else:
        exponents = range(args.min_exp, args.max_exp - 1, -1)
        grid = [2.0 ** -e for e in exponents]
        rows = symmetrization_scan(args.d, grid, args.reps,
                                   rng=np.random.default_rng(args.seed))
        for rho, mean_norm in rows:
            print(f"rho={rho:.10g}  mean_norm={mean_norm:.6g}")
        logs = np.log([r for r, _ in rows]), np.log([m for _, m in rows])
        slope = float(np.polyfit(logs[0], logs[1], 1)[0])
        print(f"log-log slope: {slope:.4f}  [d={args.d} reps={args.reps}]")
    return EXIT_OK


# ===== argument wiring ===================================================


def _default_threads():
    env = os.environ.get("COVCAL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="covcal",
        description="Sparse covariance estimation via calibrated "
                    "confidence-ball thresholding.")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate from a CSV sample")
    est.add_argument("--input", required=True)
    est.add_argument("--output-prefix", required=True)
    est.add_argument("--rho", type=float, default=None,
                     help="target false positive rate in (0, 0.5]")
    est.add_argument("--alpha", type=float, default=None,
                     help="coverage level for a concentration radius")
    est.add_argument("--regime", choices=["logconcave", "subexp", "bounded"],
                     default=None)
    est.add_argument("--c", type=float, default=1.0,
                     help="log-concavity constant (logconcave regime)")
    est.add_argument("--K", type=float, default=1.0,
                     help="tail constant (subexp regime)")
    est.add_argument("--U", type=float, default=1.0,
                     help="norm bound (bounded regime)")
    est.add_argument("--rule", default="hard",
                     choices=["hard", "soft", "scad", "adaptive"])
    est.add_argument("--metric", default="op",
                     help="op, fro, or entrywise:p:q")
    est.add_argument("--iters", type=int, default=10)
    est.add_argument("--psd", default="none", choices=["none", "shift", "clip"])
    est.add_argument("--seed", type=int, default=DEFAULT_SEED)
    est.set_defaults(func=cmd_estimate)

    sim = sub.add_parser("simulate", help="run a replicated experiment spec")
    sim.add_argument("--spec", required=True)
    sim.add_argument("--output-prefix", required=True)
    sim.add_argument("--threads", type=int, default=_default_threads())
    sim.set_defaults(func=cmd_simulate)

    genes = sub.add_parser("genes",
                           help="rank variables by F statistic and estimate "
                                "on the top/bottom selection")
    genes.add_argument("--data", required=True)
    genes.add_argument("--labels", required=True)
    genes.add_argument("--top", type=int, default=40)
    genes.add_argument("--bottom", type=int, default=160)
    genes.add_argument("--rho", type=float, default=0.05)
    genes.add_argument("--output-prefix", required=True)
    genes.set_defaults(func=cmd_genes)

    diag = sub.add_parser("diagnostics", help="calibration diagnostics")
    diag.add_argument("which", choices=["interpolation", "symmetrization"])
    diag.add_argument("--d", type=int, default=100)
    diag.add_argument("--n", type=int, default=50)
    diag.add_argument("--rho", type=float, default=0.25)
    diag.add_argument("--model", default="identity",
                      help="identity or kind:rho (ar, ma, tridiag)")
    diag.add_argument("--reps", type=int, default=20)
    diag.add_argument("--min-exp", type=int, default=8,
                      help="densest grid point is 2^-min_exp")
    diag.add_argument("--max-exp", type=int, default=2,
                      help="sparsest grid point is 2^-max_exp")
    diag.add_argument("--seed", type=int, default=DEFAULT_SEED)
    diag.set_defaults(func=cmd_diagnostics)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"covcal: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
