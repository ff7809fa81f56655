"""Command line interface: ``strengthci <command> [options]``.

Exit codes: 0 success, 2 input error, 3 numerical failure, 4 resource refusal.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, airy, densities, inference, rmt
from .models import DomainError, ModelKind, ModelSpec, model_constants, noise_scales
from .svg import Chart
from .tables import QuantileTable, TableError, embedded_table

EXIT_INPUT, EXIT_NUMERICAL, EXIT_RESOURCE = 2, 3, 4
MAX_CORNER = 100_000


class ResourceRefusal(Exception):
    """A request exceeds the default resource limits."""


class InputError(Exception):
    """Malformed or inconsistent command line input."""


# --- serialization ---------------------------------------------------------


def _json_value(v, indent: int, level: int) -> str:
    pad, inner = " " * (indent * level), " " * (indent * (level + 1))
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return f"{v:.17g}" if math.isfinite(v) else "null"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        parts = [f"{inner}{json.dumps(str(k))}: {_json_value(x, indent, level + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        if len(v) == 0:
            return "[]"
        parts = [f"{inner}{_json_value(x, indent, level + 1)}" for x in v]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps_report(obj) -> str:
    """JSON with every float written to 17 significant digits; NaN and inf become null."""
    return _json_value(obj, 2, 0) + "\n"


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])


def _read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


# --- input helpers ---------------------------------------------------------


def load_matrix(path) -> np.ndarray:
    """Headerless CSV, rows are variables and columns observations."""
    try:
        X = np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None
    if not np.all(np.isfinite(X)):
        raise InputError(f"{path}: non-finite entries")
    return X


def preprocess(X: np.ndarray, demean: bool, standardize: bool) -> np.ndarray:
    if demean or standardize:
        X = X - X.mean(axis=1, keepdims=True)
    if standardize:
        sd = X.std(axis=1, keepdims=True)
        if np.any(sd == 0):
            raise InputError("cannot standardize a constant row")
        X = X / sd
    return X


def resolve_table(arg: str | None) -> QuantileTable:
    choice = arg or os.environ.get("STRENGTHCI_TABLE") or "embedded"
    if choice == "embedded":
        return embedded_table()
    try:
        return QuantileTable.load(choice)
    except OSError as exc:
        raise InputError(f"cannot read table {choice}: {exc}") from None


def _spec_from_args(args, n_default: int | None, sigma2: float = 1.0) -> ModelSpec:
    kind = ModelKind.parse(args.model)
    N = args.n if args.n is not None else n_default
    if N is None:
        raise InputError("--n is required")
    if kind is ModelKind.WIGNER:
        return ModelSpec(kind, N, sigma2=sigma2)
    if args.s is None:
        raise InputError(f"--s is required for the {kind.value} model")
    if kind is ModelKind.CCA:
        if args.m is None:
            raise InputError("--m is required for CCA")
        return ModelSpec(kind, N, args.s, args.m)
    return ModelSpec(kind, N, args.s, sigma2=sigma2)


def _load_spectrum(args) -> tuple[np.ndarray, dict]:
    """Eigenvalues from a list file or raw data, plus inferred dimensions."""
    kind = ModelKind.parse(args.model)
    if args.eigs:
        eigs = rmt.read_eigenvalues(args.eigs)
        if eigs.size == 0:
            raise InputError(f"{args.eigs}: no eigenvalues")
        return eigs, {"N": eigs.size}
    if not args.data:
        raise InputError("give --eigs FILE or --data FILE [FILE]")
    if kind is ModelKind.CCA:
        if len(args.data) != 2:
            raise InputError("CCA needs two data matrices: --data X.csv Y.csv")
        X = preprocess(load_matrix(args.data[0]), args.demean, args.standardize)
        Y = preprocess(load_matrix(args.data[1]), args.demean, args.standardize)
        if X.shape[1] != Y.shape[1]:
            raise InputError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]} observations")
        dims = {"N": X.shape[0], "M": Y.shape[0], "S": X.shape[1]}
        if args.s is None:
            args.s = dims["S"]
        if args.m is None:
            args.m = dims["M"]
        return rmt.squared_canonical_correlations(X, Y), dims
    if len(args.data) != 1:
        raise InputError(f"the {kind.value} model takes a single data matrix")
    X = preprocess(load_matrix(args.data[0]), args.demean, args.standardize)
    if kind is ModelKind.WIGNER:
        if X.shape[0] != X.shape[1] or not np.allclose(X, X.T):
            raise InputError("Wigner input must be a symmetric square matrix")
        return np.linalg.eigvalsh(X), {"N": X.shape[0]}
    N, S = X.shape
    if N > S:
        raise InputError(f"data has N={N} variables but only S={S} observations; pass the transpose")
    if args.s is None:
        args.s = S
    return np.linalg.svd(X, compute_uv=False) ** 2 / S, {"N": N, "S": S}


def _sigma2(args, kind: ModelKind, eigs: np.ndarray, spec_unit: ModelSpec) -> tuple[float, bool]:
    if kind is ModelKind.CCA:
        return 1.0, False
    if args.sigma2 is not None and not args.estimate_sigma2:
        return float(args.sigma2), False
    return densities.estimate_sigma2(spec_unit, eigs), True


# --- plotting from CSV -----------------------------------------------------


def render_spectrum_svg(out: Path) -> str:
    """Histogram, limit density and intervals, read back from the emitted CSVs."""
    _, hist = _read_csv(out / "histogram.csv")
    _, dens = _read_csv(out / "density.csv")
    _, ivals = _read_csv(out / "intervals.csv")
    meta = json.loads((out / "report.json").read_text())
    lo = np.array([float(r[0]) for r in hist])
    hi = np.array([float(r[1]) for r in hist])
    counts = np.array([float(r[2]) for r in hist])
    edges = np.append(lo, hi[-1])
    dx = np.array([float(r[0]) for r in dens])
    dy = np.array([float(r[1]) for r in dens])
    heights = counts / max(counts.sum(), 1) / np.diff(edges)
    ymax = 1.15 * max(heights.max(initial=0), dy.max(initial=0), 1e-12)
    xs = [edges[0], edges[-1]] + [float(r[3]) for r in ivals if r[3] != "nan"]
    chart = Chart((min(xs), max(xs)), (0, ymax), title=f"{meta['model']} spectrum", xlabel="value", ylabel="density")
    chart.histogram(counts, edges)
    chart.curve(dx, dy)
    if meta.get("lambda_plus") is not None:
        chart.vline(meta["lambda_plus"], "edge")
    if meta.get("theta_c") is not None:
        chart.vline(meta["theta_c"], "theta_c", stroke="#8e44ad")
    for i, r in enumerate(ivals):
        y = ymax * (0.9 - 0.06 * (i % 12))
        chart.whisker(float(r[2]), float(r[3]), y, center=float(r[1]))
    text = chart.render()
    (out / "spectrum.svg").write_text(text, encoding="utf-8")
    return text


# --- commands --------------------------------------------------------------


def cmd_infer(args) -> int:
    kind = ModelKind.parse(args.model)
    eigs, dims = _load_spectrum(args)
    if args.n is None:
        args.n = dims["N"]
    unit = _spec_from_args(args, dims["N"])
    if unit.kind is not ModelKind.CCA and eigs.size != unit.N:
        raise InputError(f"dimension mismatch: {eigs.size} eigenvalues for N={unit.N}")
    if unit.kind is ModelKind.CCA and eigs.size != unit.N:
        raise InputError(f"dimension mismatch: {eigs.size} correlations for min(N, M)={unit.N}")
    sigma2, estimated = _sigma2(args, kind, eigs, unit)
    spec = _spec_from_args(args, dims["N"], sigma2) if kind is not ModelKind.CCA else unit
    table = resolve_table(args.table)
    const = model_constants(spec)
    theta_scale, lam_scale = noise_scales(spec)
    edge = const.lambda_plus * lam_scale
    eigs = np.sort(eigs)[::-1]
    signals = eigs[eigs > edge]
    reports, rows = [], []
    for lam in signals:
        ci = inference.confidence_interval(spec, float(lam), args.alpha, table)
        gi = inference.gaussian_interval(spec, float(lam), args.alpha, "direct")
        rep = ci.to_report()
        rep["warnings"] = ci.warnings
        reports.append(rep)
        rows.append([float(lam), ci.theta_hat, ci.theta_lower, ci.theta_upper, int(ci.one_sided), int(ci.clamped_lower),
                     rep["classification"], gi.theta_lower, gi.theta_upper, int(gi.diverged)])
    bulk = eigs[eigs <= edge] / lam_scale
    ks = densities.kolmogorov_distance(spec, bulk) if bulk.size else math.nan
    report = {
        "model": spec.kind.value,
        "N": spec.N,
        "shape": spec.shape(),
        "sigma2_used": spec.sigma2,
        "sigma2_estimated": estimated,
        "alpha": args.alpha,
        "lambda_plus": edge,
        "theta_c": const.theta_c * theta_scale,
        "table": table.provenance.get("source", "file"),
        "bulk_fit": {"n_bulk": int(bulk.size), "kolmogorov_distance": ks},
        "intervals": reports,
        "version": __version__,
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(dumps_report(report), encoding="utf-8")
    _write_csv(out / "intervals.csv",
               ["lambda", "theta_hat", "theta_lower", "theta_upper", "one_sided", "clamped", "classification",
                "gaussian_lower", "gaussian_upper", "gaussian_diverged"], rows)
    counts, edges = np.histogram(eigs, bins=args.bins)
    _write_csv(out / "histogram.csv", ["bin_lo", "bin_hi", "count"],
               [[float(a), float(b), int(c)] for a, b, c in zip(edges[:-1], edges[1:], counts)])
    lo, hi = const.lambda_minus, const.lambda_plus
    x = np.linspace(lo, hi, 400)
    y = np.array([densities.density(spec, t) for t in x]) / lam_scale
    _write_csv(out / "density.csv", ["x", "density"], [[float(a * lam_scale), float(b)] for a, b in zip(x, y)])
    render_spectrum_svg(out)
    print(dumps_report({k: report[k] for k in ("model", "N", "sigma2_used", "lambda_plus", "theta_c")}), end="")
    for rep in reports:
        print(f"lambda={rep['lambda']:.6g}  [{rep['theta_lower']:.6g}, {rep['theta_upper']:.6g}]  {rep['classification']}")
    if not reports:
        print("no eigenvalues above the bulk edge")
    return 0


def cmd_simulate_table(args) -> int:
    grid = np.round(np.arange(args.theta_min, args.theta_max + args.theta_step / 2, args.theta_step), 10)
    cfg = airy.TransitionSimConfig(
        N=args.n, corner_m=args.m, mc=args.mc, theta_grid=tuple(grid), master_seed=args.seed, scaling=args.scaling
    )
    if cfg.m > MAX_CORNER and not args.allow_large:
        raise ResourceRefusal(f"corner size m={cfg.m} exceeds {MAX_CORNER}; pass --allow-large to proceed")
    build = airy.build_quantile_table(cfg, workers=args.workers, bootstrap_reps=args.bootstrap)
    out = Path(args.out)
    path = out / "transition_quantiles.csv" if out.suffix != ".csv" else out
    path.parent.mkdir(parents=True, exist_ok=True)
    build.table.save(path)
    print("theta," + ",".join(f"se_q{a!r}" for a in build.table.alphas.tolist()))
    for theta, se in zip(build.table.theta_grid.tolist(), build.standard_errors):
        print(f"{theta!r}," + ",".join(f"{v:.4f}" for v in se))
    print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_coverage(args) -> int:
    spec = _spec_from_args(args, None, args.sigma2 if args.sigma2 is not None else 1.0)
    table = resolve_table(args.table)
    rep = inference.coverage_experiment(
        spec, args.thetas, args.alpha, args.reps, args.noise, args.signal, args.seed, table, workers=args.workers
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cols = list(rep.to_rows()[0])
    _write_csv(out / "coverage.csv", cols, [[r[c] for c in cols] for r in rep.to_rows()])
    hist_rows = []
    for h in rep.histogram:
        for a, b, c in zip(h["edges"][:-1], h["edges"][1:], h["counts"]):
            hist_rows.append([h["theta"], a, b, c])
    _write_csv(out / "lambda_hist.csv", ["theta", "bin_lo", "bin_hi", "count"], hist_rows)
    render_coverage_svg(out, 1 - args.alpha)
    for r in rep.rows:
        print(f"theta={r.theta:.4g}  transition={r.coverage_transition:.4f}  gaussian={r.coverage_gaussian:.4f}"
              f"  (diverged {r.diverged_gaussian})")
    return 0


def render_coverage_svg(out: Path, nominal: float) -> str:
    header, rows = _read_csv(out / "coverage.csv")
    col = {name: i for i, name in enumerate(header)}
    th = np.array([float(r[col["theta"]]) for r in rows])
    ct = np.array([float(r[col["coverage_transition"]]) for r in rows])
    cg = np.array([float(r[col["coverage_gaussian"]]) for r in rows])
    pad = 0.05 * max(th.max() - th.min(), 1e-3)
    chart = Chart((th.min() - pad, th.max() + pad), (min(ct.min(), cg.min(), nominal) - 0.05, 1.0),
                  title="empirical coverage", xlabel="theta", ylabel="coverage")
    chart.curve(th, ct, stroke="#27ae60")
    chart.curve(th, cg, stroke="#c0392b")
    chart.curve([th.min() - pad, th.max() + pad], [nominal, nominal], stroke="#7f8c8d", width=1)
    text = chart.render()
    (out / "coverage.svg").write_text(text, encoding="utf-8")
    return text


def _spectrum_for_fit(args) -> tuple[np.ndarray, ModelSpec]:
    if args.simulate:
        if ModelKind.parse(args.model) is not ModelKind.WIGNER and args.s is None:
            raise InputError("--s is required to simulate this model")
        spec = _spec_from_args(args, args.simulate, args.sigma2 if args.sigma2 is not None else 1.0)
        return rmt.simulate_spiked_model(spec, [], rng=rmt.RngStream(args.seed, 0).generator()).eigenvalues, spec
    eigs, dims = _load_spectrum(args)
    if args.n is None:
        args.n = dims["N"]
    unit = _spec_from_args(args, dims["N"])
    sigma2, _ = _sigma2(args, unit.kind, eigs, unit)
    spec = _spec_from_args(args, dims["N"], sigma2) if unit.kind is not ModelKind.CCA else unit
    return eigs, spec


def cmd_fit_density(args) -> int:
    eigs, spec = _spectrum_for_fit(args)
    _, lam_scale = noise_scales(spec)
    const = model_constants(spec)
    edge = const.lambda_plus * lam_scale
    bulk = eigs[eigs <= edge]
    ks = densities.kolmogorov_distance(spec, bulk / lam_scale) if bulk.size else math.nan
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    counts, edges = np.histogram(eigs, bins=args.bins)
    _write_csv(out / "histogram.csv", ["bin_lo", "bin_hi", "count"],
               [[float(a), float(b), int(c)] for a, b, c in zip(edges[:-1], edges[1:], counts)])
    x = np.linspace(const.lambda_minus, const.lambda_plus, 400)
    y = np.array([densities.density(spec, t) for t in x]) / lam_scale
    _write_csv(out / "density.csv", ["x", "density"], [[float(a * lam_scale), float(b)] for a, b in zip(x, y)])
    summary = {"model": spec.kind.value, "N": spec.N, "shape": spec.shape(), "sigma2_used": spec.sigma2,
               "lambda_plus": edge, "n_bulk": int(bulk.size), "kolmogorov_distance": ks}
    (out / "fit.json").write_text(dumps_report(summary), encoding="utf-8")
    _, hist = _read_csv(out / "histogram.csv")
    _, dens = _read_csv(out / "density.csv")
    hedges = np.append([float(r[0]) for r in hist], float(hist[-1][1]))
    hcounts = np.array([float(r[2]) for r in hist])
    dx, dy = np.array([float(r[0]) for r in dens]), np.array([float(r[1]) for r in dens])
    heights = hcounts / hcounts.sum() / np.diff(hedges)
    chart = Chart((min(hedges[0], dx[0]), max(hedges[-1], dx[-1])), (0, 1.15 * max(heights.max(), dy.max())),
                  title=f"{spec.kind.value} spectrum and limit density", xlabel="eigenvalue", ylabel="density")
    chart.histogram(hcounts, hedges)
    chart.curve(dx, dy)
    chart.vline(edge, "edge")
    chart.save(out / "fit.svg")
    print(dumps_report(summary), end="")
    return 0


def cmd_estimate_variance(args) -> int:
    if ModelKind.parse(args.model) is ModelKind.CCA:
        raise InputError("canonical correlations do not depend on the noise variance")
    if args.simulate:
        spec = _spec_from_args(args, args.simulate, args.sigma2 if args.sigma2 is not None else 1.0)
        eigs = rmt.simulate_spiked_model(spec, [], rng=rmt.RngStream(args.seed, 0).generator()).eigenvalues
    else:
        eigs, dims = _load_spectrum(args)
        if args.n is None:
            args.n = dims["N"]
        spec = _spec_from_args(args, dims["N"])
    unit = ModelSpec(spec.kind, spec.N, spec.S, spec.M, 1.0)
    est = densities.estimate_sigma2(unit, eigs)
    print(dumps_report({"model": spec.kind.value, "N": spec.N, "shape": spec.shape(), "sigma2_hat": est}), end="")
    return 0


def cmd_export_table(args) -> int:
    table = resolve_table(args.table)
    if args.out == "-":
        sys.stdout.write(table.to_csv())
    else:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        table.save(path)
    return 0


# --- parser ----------------------------------------------------------------


def _model_flags(p, require_model=True):
    p.add_argument("--model", choices=["wigner", "cov", "factor", "cca"], required=require_model, default=None if require_model else "wigner")
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--m", type=int)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--sigma2", type=float)
    group.add_argument("--estimate-sigma2", action="store_true")


def _input_flags(p):
    p.add_argument("--eigs", help="newline-separated eigenvalues")
    p.add_argument("--data", nargs="+", help="headerless CSV matrix (two for CCA), rows are variables")
    p.add_argument("--demean", action="store_true")
    p.add_argument("--standardize", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="strengthci", description="Confidence intervals for signal strength in spiked random matrix models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="confidence intervals for eigenvalues above the bulk edge")
    _model_flags(p)
    _input_flags(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--table")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=60)
    p.add_argument("--out", default="strengthci_out")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("simulate-table", help="regenerate the quantile table of T(Theta)")
    p.add_argument("--n", type=int, default=100_000_000)
    p.add_argument("--m", type=int)
    p.add_argument("--mc", type=int, default=20_000)
    p.add_argument("--theta-min", type=float, default=-3.0)
    p.add_argument("--theta-max", type=float, default=6.0)
    p.add_argument("--theta-step", type=float, default=0.1)
    p.add_argument("--scaling", choices=airy.SCALINGS, default="centered")
    p.add_argument("--bootstrap", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--allow-large", action="store_true", help="permit corners larger than 1e5")
    p.add_argument("--out", default="strengthci_out")
    p.set_defaults(func=cmd_simulate_table)

    p = sub.add_parser("coverage", help="Monte Carlo coverage of the interval procedures")
    _model_flags(p)
    p.add_argument("--thetas", type=float, nargs="+", default=[0.8, 1.0, 1.2, 1.5, 2.0])
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--noise", choices=[f.value for f in rmt.NoiseFamily], default="gaussian")
    p.add_argument("--signal", choices=[s.value for s in rmt.SignalKind], default="localized")
    p.add_argument("--table")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="strengthci_out")
    p.set_defaults(func=cmd_coverage)

    for name, func, helptext in (
        ("fit-density", cmd_fit_density, "histogram with the fitted limit density"),
        ("estimate-variance", cmd_estimate_variance, "noise variance from the middle of the spectrum"),
    ):
        p = sub.add_parser(name, help=helptext)
        _model_flags(p)
        _input_flags(p)
        p.add_argument("--simulate", type=int, metavar="N", help="use a simulated pure-noise spectrum of size N")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--bins", type=int, default=60)
        p.add_argument("--out", default="strengthci_out")
        p.set_defaults(func=func)

    p = sub.add_parser("export-table", help="write the quantile table as CSV")
    p.add_argument("--table")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_export_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "alpha", 0.5) is not None and not 0 < getattr(args, "alpha", 0.5) < 1:
        print("error: --alpha must lie in (0, 1)", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ResourceRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except inference.RootFindingError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, DomainError, TableError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FloatingPointError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
