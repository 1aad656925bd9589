"""Command-line interface.

Subcommands: fit, gof, simulate, tolerance, dataset, lambda-limit. Output is
machine-readable (json default, csv, or human). Every command that consumes
randomness reports the master seed it used; omitting --seed draws a fresh one
so any run can be reproduced afterwards.

Exit codes: 0 ok, 2 validation error, 3 computation error (degenerate data),
4 I/O error.
"""

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .binning import Sample, bin_sample
from .datasets import DatasetSpec, NAMED_DATASETS, analyze_dataset, tail_rows
from .errors import BracketingError, EstimatorUndefinedError, LambdaTooLargeError
from .estimation import fit_exponent, regression_estimate
from .experiments import (
    ExperimentConfig,
    default_lambda_grid,
    lambda_opt_search,
    lambda_rule_of_n,
    run_bias_rejection,
    sensitivity_curve,
    tolerance_search,
    write_cells_csv,
    write_replicates_csv,
)
from .gof import (
    bootstrap_pvalue,
    bootstrap_pvalue_continuous,
    lambda_upper_limit,
    quick_reject_19,
    quick_reject_19_continuous,
)
from .sampling import NoiseSpec
from .seeding import child_seed, fresh_seed


def _threads_default():
    return int(os.environ.get("POWERBIN_THREADS", "1"))


def _resolve_seed(args):
    seed = args.seed if args.seed is not None else fresh_seed()
    print(f"# master seed: {seed}", file=sys.stderr)
    return seed


def _emit(payload, fmt):
    if fmt == "json":
        print(json.dumps(payload, indent=2))
    elif fmt == "csv":
        flat = {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}
        print(",".join(flat))
        print(",".join("" if v is None else str(v) for v in flat.values()))
    else:
        for k, v in payload.items():
            if isinstance(v, (dict, list)):
                v = json.dumps(v)
            print(f"{k} = {v}")


def _load_values(path, transform, unit):
    values = []
    with open(path) as fh:
        for line in fh:
            token = line.strip()
            if not token:
                continue
            values.append(float(token))
    arr = np.asarray(values, dtype=float)
    if transform == "richter_pow10":
        arr = 10.0**arr
    return arr * unit


def _sample_from_file(path, x_min, transform, unit):
    arr = _load_values(path, transform, unit)
    arr = arr[arr >= x_min]
    if arr.size == 0:
        raise ValueError(f"no values at or above x_min={x_min:g} in {path}")
    return Sample(arr, x_min)


# ---------------------------------------------------------------------------
# subcommands

def cmd_fit(args):
    s = _sample_from_file(args.input, args.xm, args.transform, args.unit)
    if args.method == "regression":
        fit = regression_estimate(s)
    else:
        fit = fit_exponent(s, args.lam)
    _emit(fit.as_dict(), args.format)
    return 0


def cmd_gof(args):
    s = _sample_from_file(args.input, args.xm, args.transform, args.unit)
    seed = _resolve_seed(args)
    if args.quick:
        if args.lam == 1.0:
            g = quick_reject_19_continuous(s, seed, args.threads)
        else:
            g = quick_reject_19(bin_sample(s, args.lam), seed, args.threads)
    elif args.lam == 1.0:
        g = bootstrap_pvalue_continuous(s, args.boot, seed, args.threads)
    else:
        g = bootstrap_pvalue(bin_sample(s, args.lam), args.boot, seed, args.threads)
    payload = g.as_dict() | {"lambda": args.lam, "x_min": args.xm, "n": s.n, "seed": seed}
    _emit(payload, args.format)
    return 0


def cmd_lambda_limit(args):
    limit = lambda_upper_limit(args.alpha, args.xm, args.n, args.tol, args.lam_max)
    _emit(
        {"lambda_limit": limit, "alpha": args.alpha, "n": args.n, "tol": args.tol},
        args.format,
    )
    return 0


def cmd_tolerance(args):
    seed = _resolve_seed(args)
    res = tolerance_search(
        args.alpha,
        args.lam,
        args.n,
        args.kind,
        seed,
        target=args.target,
        half_width=args.half_width,
        rel_window=args.rel_window,
        sigma_max=args.sigma_max,
        n_jobs=args.threads,
    )
    payload = {
        "kind": res.kind,
        "alpha": res.alpha,
        "lambda": res.lam,
        "n": res.n,
        "target": res.target,
        "sigma_hat": res.sigma_hat,
        "mean_alpha_hat": res.mean_alpha_hat,
        "rejection_rate": res.rejection_rate,
        "trials": res.trials,
        "trace": res.trace,
        "seed": seed,
    }
    _emit(payload, args.format)
    return 0


def cmd_dataset(args):
    name = args.name
    spec = DatasetSpec(
        name=name,
        path=args.input,
        x_min=args.xm,
        transform=args.transform,
        unit=args.unit,
    )
    seed = _resolve_seed(args)
    lambdas = _parse_float_list(args.lambdas)
    report = analyze_dataset(spec, lambdas, args.boot, seed, args.threads)
    report["seed"] = seed
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"# report written to {args.out}", file=sys.stderr)
    else:
        print(text)
    if args.tail_csv:
        from .datasets import load_dataset

        rows = tail_rows(load_dataset(spec).sample)
        lines = ["x,tail_prob"] + [f"{r['x']!r},{r['tail_prob']!r}" for r in rows]
        Path(args.tail_csv).write_text("\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------------------
# simulate: declarative config, preset experiments

CONFIG_KEYS = {
    "preset": str,
    "alpha": float,
    "n": int,
    "replicates": int,
    "lambda_grid": "floats",
    "noise_kind": str,
    "sigma": float,
    "noise_kinds": "strs",
    "sigmas": "floats",
    "n_grid": "ints",
    "n_boot": int,
    "seed": int,
    "gof": str,
    "grid_points": int,
    "tolerance_alphas": "floats",
    "tolerance_lambdas": "floats",
    "tolerance_half_width": float,
    "tolerance_rel_window": float,
}


def _parse_float_list(text):
    return [float(v) for v in str(text).split(",") if v != ""]


def _convert(kind, raw):
    if kind is str:
        return raw
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    if kind == "floats":
        return [float(v) for v in raw.split(",")]
    if kind == "ints":
        return [int(v) for v in raw.split(",")]
    if kind == "strs":
        return [v.strip() for v in raw.split(",")]
    raise AssertionError(kind)


def parse_config(path):
    """Parse a key = value config file; collect every violation with its
    line number before failing."""
    values = {}
    errors = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                errors.append(f"line {lineno}: expected 'key = value', got {line!r}")
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in CONFIG_KEYS:
                errors.append(f"line {lineno}: unknown key {key!r}")
                continue
            if key in values:
                errors.append(f"line {lineno}: duplicate key {key!r}")
                continue
            try:
                values[key] = _convert(CONFIG_KEYS[key], value)
            except ValueError:
                errors.append(f"line {lineno}: cannot parse {key!r} value {value!r}")
    if "preset" not in values:
        errors.append("missing required key 'preset'")
    if errors:
        raise ValueError("invalid config:\n  " + "\n  ".join(errors))
    return values


def _preset_fig2(cfg, seed, threads, workdir):
    base = ExperimentConfig(
        alpha=cfg.get("alpha", 1.5),
        n=cfg.get("n", 500),
        replicates=cfg.get("replicates", 1000),
        lambda_grid=tuple(cfg.get("lambda_grid", [1.0, 2.0, 4.0])),
        n_boot=cfg.get("n_boot", 99),
        gof_mode=cfg.get("gof", "bootstrap"),
        n_jobs=threads,
    )
    sigma = cfg.get("sigma", 0.2)
    treatments = [
        ("none", 0.0),
        ("additive", sigma),
        ("multiplicative", sigma),
    ]
    results = []
    for i, (kind, sig) in enumerate(treatments):
        sub = replace(
            base,
            noise=NoiseSpec(kind, sig),
            master_seed=int(child_seed(seed, i).generate_state(1, np.uint64)[0]),
            workdir=None if workdir is None else str(Path(workdir) / f"fig2_{kind}"),
        )
        results.append(run_bias_rejection(sub, label=f"fig2_{kind}"))
    return results, {}


def _preset_fig3(cfg, seed, threads, workdir):
    alpha = cfg.get("alpha", 1.5)
    n = cfg.get("n", 100_000)
    grid = tuple(
        cfg.get("lambda_grid", default_lambda_grid(alpha, n, cfg.get("grid_points", 16)))
    )
    kinds = cfg.get("noise_kinds", ["additive", "multiplicative"])
    sigmas = cfg.get("sigmas", [0.1, 0.2])
    results = []
    opts = {}
    i = 0
    for kind in kinds:
        for sigma in sigmas:
            label = f"fig3_{kind}_{sigma:g}"
            sub = ExperimentConfig(
                alpha=alpha,
                n=n,
                replicates=cfg.get("replicates", 100),
                lambda_grid=grid,
                noise=NoiseSpec(kind, sigma),
                master_seed=int(child_seed(seed, i).generate_state(1, np.uint64)[0]),
                gof_mode=cfg.get("gof", "quick"),
                include_regression=False,
                n_jobs=threads,
                workdir=None if workdir is None else str(Path(workdir) / label),
            )
            opt = lambda_opt_search(sub, label=label)
            results.append(opt.curve)
            opts[label] = {
                "lambda_opt": opt.lambda_opt,
                "log_ratio": opt.log_ratio,
                "median_r": opt.curve.median_r,
            }
            i += 1
    return results, {"lambda_opt": opts}


def _preset_fig4(cfg, seed, threads, workdir):
    result = sensitivity_curve(
        sigmas=cfg.get("sigmas", [1.0]),
        lambda_grid=cfg.get("lambda_grid", [1.3, 1.6, 2.0, 3.0, 4.0]),
        n=cfg.get("n", 500),
        replicates=cfg.get("replicates", 500),
        master_seed=seed,
        alpha=cfg.get("alpha", 1.5),
        gof_mode=cfg.get("gof", "quick"),
        n_boot=cfg.get("n_boot", 99),
        n_jobs=threads,
        workdir=workdir,
        label="fig4",
    )
    return [result], {}


def _preset_fig5(cfg, seed, threads, workdir):
    alpha = cfg.get("alpha", 1.5)
    results = []
    i = 0
    for sigma in cfg.get("sigmas", [0.0, 0.1, 0.2, 0.4]):
        for kind in cfg.get("noise_kinds", ["additive", "multiplicative"]):
            if sigma == 0.0 and kind != "additive":
                continue
            n = cfg.get("n", 500)
            grid = sorted({1.0, 2.0, 4.0, lambda_rule_of_n(n, alpha)})
            sub = ExperimentConfig(
                alpha=alpha,
                n=n,
                replicates=cfg.get("replicates", 200),
                lambda_grid=tuple(grid),
                noise=NoiseSpec(kind if sigma > 0 else "none", sigma),
                master_seed=int(child_seed(seed, i).generate_state(1, np.uint64)[0]),
                gof_mode=cfg.get("gof", "quick"),
                include_regression=False,
                n_jobs=threads,
                workdir=None if workdir is None else str(Path(workdir) / f"fig5s_{i}"),
            )
            results.append(run_bias_rejection(sub, label=f"fig5_sigma_{kind}"))
            i += 1
    for n in cfg.get("n_grid", [100, 1000, 10000]):
        grid = sorted({1.0, 2.0, 4.0, lambda_rule_of_n(n, alpha)})
        sub = ExperimentConfig(
            alpha=alpha,
            n=n,
            replicates=cfg.get("replicates", 200),
            lambda_grid=tuple(grid),
            noise=NoiseSpec("additive", cfg.get("sigma", 0.2)),
            master_seed=int(child_seed(seed, i).generate_state(1, np.uint64)[0]),
            gof_mode=cfg.get("gof", "quick"),
            include_regression=False,
            n_jobs=threads,
            workdir=None if workdir is None else str(Path(workdir) / f"fig5n_{i}"),
        )
        results.append(run_bias_rejection(sub, label="fig5_n_additive"))
        i += 1
    return results, {}


def _preset_fig6(cfg, seed, threads, workdir):
    alphas = cfg.get("tolerance_alphas", [1.25, 1.5, 2.0])
    lambdas = cfg.get("tolerance_lambdas", [1.5, 2.0, 3.0])
    kinds = cfg.get("noise_kinds", ["additive", "multiplicative"])
    n = cfg.get("n", 500)
    rows = []
    i = 0
    for kind in kinds:
        for alpha in alphas:
            for lam in lambdas:
                sub_seed = int(child_seed(seed, i).generate_state(1, np.uint64)[0])
                i += 1
                try:
                    res = tolerance_search(
                        alpha, lam, n, kind, sub_seed,
                        half_width=cfg.get("tolerance_half_width", 0.005),
                        rel_window=cfg.get("tolerance_rel_window", 0.02),
                        n_jobs=threads,
                    )
                except (BracketingError, ValueError) as exc:
                    rows.append(
                        {"kind": kind, "alpha": alpha, "lambda": lam, "n": n,
                         "sigma_hat": None, "mean_alpha_hat": None,
                         "rejection_rate": None, "trials": None, "error": str(exc)}
                    )
                    continue
                rows.append(
                    {"kind": kind, "alpha": alpha, "lambda": lam, "n": n,
                     "sigma_hat": res.sigma_hat, "mean_alpha_hat": res.mean_alpha_hat,
                     "rejection_rate": res.rejection_rate, "trials": res.trials,
                     "error": None}
                )
    return rows, {}


def _preset_custom(cfg, seed, threads, workdir):
    base = ExperimentConfig(
        alpha=cfg.get("alpha", 1.5),
        n=cfg.get("n", 500),
        replicates=cfg.get("replicates", 100),
        lambda_grid=tuple(cfg.get("lambda_grid", [1.0, 2.0, 4.0])),
        noise=NoiseSpec(cfg.get("noise_kind", "none"), cfg.get("sigma", 0.0)),
        n_boot=cfg.get("n_boot", 99),
        master_seed=seed,
        gof_mode=cfg.get("gof", "quick"),
        n_jobs=threads,
        workdir=workdir,
    )
    return [run_bias_rejection(base, label="custom")], {}


PRESETS = {
    "fig2": _preset_fig2,
    "fig3": _preset_fig3,
    "fig4": _preset_fig4,
    "fig5": _preset_fig5,
    "fig6": _preset_fig6,
    "custom": _preset_custom,
}


def cmd_simulate(args):
    cfg = parse_config(args.config)
    preset = cfg["preset"]
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    seed = args.seed if args.seed is not None else cfg.get("seed", fresh_seed())
    print(f"# master seed: {seed}", file=sys.stderr)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    workdir = str(outdir / f"{preset}_blocks") if args.resume else None
    started = time.time()
    output, extras = PRESETS[preset](cfg, seed, args.threads, workdir)
    outputs = []
    if preset == "fig6":
        path = outdir / "fig6_tolerance.csv"
        cols = ("kind", "alpha", "lambda", "n", "sigma_hat", "mean_alpha_hat",
                "rejection_rate", "trials", "error")
        lines = [",".join(cols)]
        for row in output:
            lines.append(
                ",".join(
                    "" if row[c] is None else (repr(row[c]) if isinstance(row[c], float) else str(row[c]))
                    for c in cols
                )
            )
        path.write_text("\n".join(lines) + "\n")
        outputs.append(str(path))
    else:
        cells_path = outdir / f"{preset}_cells.csv"
        reps_path = outdir / f"{preset}_replicates.csv"
        write_cells_csv(output, cells_path)
        write_replicates_csv(output, reps_path)
        outputs += [str(cells_path), str(reps_path)]
    manifest = {
        "tool": "powerbin",
        "version": __version__,
        "preset": preset,
        "seed": seed,
        "config": {k: v for k, v in cfg.items()},
        "threads": args.threads,
        "elapsed_seconds": round(time.time() - started, 3),
        "numpy": np.__version__,
        "outputs": outputs,
    }
    manifest_path = outdir / f"{preset}_manifest.json"
    manifest_path.write_text(json.dumps(manifest | extras, indent=2) + "\n")
    print(json.dumps({"outputs": outputs, "manifest": str(manifest_path), "seed": seed}, indent=2))
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser():
    parser = argparse.ArgumentParser(
        prog="powerbin",
        description="Robust power-law exponent inference through logarithmic binning",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, rng=True):
        p.add_argument("--format", choices=("json", "csv", "human"), default="json")
        if rng:
            p.add_argument("--seed", type=int, default=None,
                           help="master seed; omitted -> fresh seed, always reported")
            p.add_argument("--threads", type=int, default=_threads_default(),
                           help="worker threads (env POWERBIN_THREADS)")

    p = sub.add_parser("fit", help="estimate the tail exponent from a file of values")
    p.add_argument("input")
    p.add_argument("--xm", type=float, required=True, help="tail threshold (explicit, never inferred)")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="binning ratio; 1 = unbinned")
    p.add_argument("--method", choices=("mle", "regression"), default="mle")
    p.add_argument("--transform", choices=("identity", "richter_pow10"), default="identity")
    p.add_argument("--unit", type=float, default=1.0)
    add_common(p, rng=False)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("gof", help="bootstrap goodness-of-fit test")
    p.add_argument("input")
    p.add_argument("--xm", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--boot", type=int, default=999, help="bootstrap replicates (>= 19)")
    p.add_argument("--quick", action="store_true",
                   help="19-draw test: decides p < 0.05 only")
    p.add_argument("--transform", choices=("identity", "richter_pow10"), default="identity")
    p.add_argument("--unit", type=float, default=1.0)
    add_common(p)
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("simulate", help="run a preset or custom Monte Carlo sweep")
    p.add_argument("config", help="key = value config file; see README for the schema")
    p.add_argument("--out-dir", default="powerbin_results")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--threads", type=int, default=_threads_default())
    p.add_argument("--resume", action="store_true",
                   help="stream replicate blocks to disk and reuse them on re-run")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tolerance", help="binary search for the tolerable noise level")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=("additive", "multiplicative"), required=True)
    p.add_argument("--target", type=float, default=0.10)
    p.add_argument("--half-width", type=float, default=0.005,
                   help="required binomial 95%% CI half-width at the returned sigma")
    p.add_argument("--rel-window", type=float, default=0.02,
                   help="relative bracket width around the returned sigma")
    p.add_argument("--sigma-max", type=float, default=None)
    add_common(p)
    p.set_defaults(func=cmd_tolerance)

    p = sub.add_parser("dataset", help="fixed-threshold analysis of an empirical dataset")
    p.add_argument("input")
    p.add_argument("--name", default="custom",
                   help=f"one of {sorted(NAMED_DATASETS)} or 'custom'")
    p.add_argument("--xm", type=float, required=True)
    p.add_argument("--transform", choices=("identity", "richter_pow10"), default=None)
    p.add_argument("--unit", type=float, default=1.0)
    p.add_argument("--lambdas", default="1,2,4", help="comma-separated binning ratios")
    p.add_argument("--boot", type=int, default=999)
    p.add_argument("--tail-csv", default=None, help="also write the empirical tail CDF")
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    add_common(p)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("lambda-limit", help="largest binning ratio for a few-bin tolerance")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, required=True)
    p.add_argument("--xm", type=float, default=1.0)
    p.add_argument("--lam-max", type=float, default=1e9)
    add_common(p, rng=False)
    p.set_defaults(func=cmd_lambda_limit)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "dataset" and args.transform is None:
        args.transform = NAMED_DATASETS.get(args.name, {}).get("transform", "identity")
    try:
        return args.func(args)
    except (EstimatorUndefinedError, LambdaTooLargeError, BracketingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
