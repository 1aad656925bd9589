"""Monte Carlo harnesses for the validation studies.

One engine generates a sample per replicate (power law plus optional noise,
or a lognormal tail), fits every estimator treatment on it, and runs the
requested goodness-of-fit test per binning ratio. Replicate seeds are derived
from the master seed by position, results are gathered in replicate order,
and optional per-replicate JSON blocks on disk let interrupted sweeps resume;
aggregate tables are therefore identical for any worker count.
"""

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .binning import Sample, bin_sample
from .errors import BracketingError, EstimatorUndefinedError, LambdaTooLargeError
from .estimation import mle_binned, mle_continuous, regression_estimate
from .gof import (
    bootstrap_pvalue,
    bootstrap_pvalue_continuous,
    quick_reject_19,
    quick_reject_19_continuous,
)
from .parallelism import map_indexed
from .sampling import (
    LognormalTailParams,
    NoiseSpec,
    ParetoParams,
    apply_noise,
    lognormal_tail_sample,
    pareto_sample,
    solve_matching_mu,
)
from .seeding import child_seed
from .validation import check_count, check_positive, check_ratio

GOF_MODES = ("quick", "bootstrap", "none")


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep parameters: data-generating exponent, sample size, replicate
    count, binning-ratio grid, noise treatment, and seeding."""

    alpha: float = 1.5
    n: int = 500
    replicates: int = 1000
    lambda_grid: tuple = (1.0, 2.0, 4.0)
    noise: NoiseSpec = NoiseSpec()
    n_boot: int = 99
    master_seed: int = 0
    x_min: float = 1.0
    gof_mode: str = "quick"
    include_regression: bool = True
    n_jobs: int = 1
    workdir: str | None = None

    def __post_init__(self):
        check_positive(self.alpha, "alpha")
        check_count(self.n, "n")
        check_count(self.replicates, "replicates")
        check_positive(self.x_min, "x_min")
        if len(self.lambda_grid) == 0:
            raise ValueError("lambda_grid must be nonempty")
        grid = tuple(check_ratio(l, allow_unbinned=True) for l in self.lambda_grid)
        if list(grid) != sorted(grid):
            raise ValueError("lambda_grid must be sorted ascending")
        object.__setattr__(self, "lambda_grid", grid)
        if self.gof_mode not in GOF_MODES:
            raise ValueError(f"gof_mode must be one of {GOF_MODES}")
        if self.gof_mode == "bootstrap":
            check_count(self.n_boot, "n_boot", minimum=19)


@dataclass
class CellStats:
    """Aggregates for one (method, lambda, noise, n) cell of a sweep."""

    experiment: str
    method: str
    lam: float
    noise_kind: str
    sigma: float
    n: int
    alpha: float
    replicates: int
    valid: int
    mean_alpha: float | None
    sd_alpha: float | None
    bias: float | None
    mse: float | None
    tested: int
    rejections: int
    rejection_rate: float | None
    degenerate: int
    flagged: bool


@dataclass
class SweepResult:
    """Cell aggregates plus the raw per-replicate records behind them."""

    label: str
    cells: list
    replicates: list
    median_r: float | None

    def cell(self, method, lam=None, sigma=None, n=None):
        """The unique cell matching the given coordinates."""
        found = [
            c
            for c in self.cells
            if c.method == method
            and (lam is None or c.lam == lam)
            and (sigma is None or c.sigma == sigma)
            and (n is None or c.n == n)
        ]
        if len(found) != 1:
            raise KeyError(f"{len(found)} cells match method={method} lam={lam} sigma={sigma} n={n}")
        return found[0]


@dataclass
class LambdaOptResult:
    """MSE-minimizing binning ratio and where it sits within the data range."""

    lambda_opt: float
    log_ratio: float
    curve: SweepResult


@dataclass
class ToleranceResult:
    """Output of the stochastic binary search for the tolerable noise level."""

    kind: str
    alpha: float
    lam: float
    n: int
    target: float
    sigma_hat: float
    mean_alpha_hat: float
    rejection_rate: float
    trials: int
    trace: list
    master_seed: int


# ---------------------------------------------------------------------------
# replicate workers

def _fit_and_test(s, lam, gof_mode, n_boot, seed):
    entry = {
        "method": "mle",
        "lam": float(lam),
        "alpha_hat": None,
        "p_value": None,
        "reject": None,
        "degenerate": False,
    }
    binned = None
    try:
        if lam == 1.0:
            fit = mle_continuous(s)
        else:
            binned = bin_sample(s, lam)
            fit = mle_binned(binned)
    except EstimatorUndefinedError:
        entry["degenerate"] = True
        return entry
    entry["alpha_hat"] = fit.alpha_hat
    if gof_mode == "none":
        return entry
    try:
        if gof_mode == "quick":
            g = (
                quick_reject_19(binned, seed)
                if binned is not None
                else quick_reject_19_continuous(s, seed)
            )
        else:
            g = (
                bootstrap_pvalue(binned, n_boot, seed)
                if binned is not None
                else bootstrap_pvalue_continuous(s, n_boot, seed)
            )
        entry["p_value"] = g.p_value
        entry["reject"] = bool(g.reject_at_005)
    except LambdaTooLargeError:
        entry["degenerate"] = True
    return entry


def _record_from_values(cfg, rep, xs):
    record = {"rep": rep, "r": None, "entries": []}
    if xs.size == 0:
        for lam in cfg.lambda_grid:
            record["entries"].append(
                {"method": "mle", "lam": float(lam), "alpha_hat": None,
                 "p_value": None, "reject": None, "degenerate": True}
            )
        if cfg.include_regression:
            record["entries"].append(
                {"method": "regression", "lam": 1.0, "alpha_hat": None,
                 "p_value": None, "reject": None, "degenerate": True}
            )
        return record
    s = Sample(xs, cfg.x_min)
    record["r"] = float(np.max(xs) / cfg.x_min)
    for j, lam in enumerate(cfg.lambda_grid):
        seed = child_seed(cfg.master_seed, rep, 2, j)
        record["entries"].append(_fit_and_test(s, lam, cfg.gof_mode, cfg.n_boot, seed))
    if cfg.include_regression:
        entry = {"method": "regression", "lam": 1.0, "alpha_hat": None,
                 "p_value": None, "reject": None, "degenerate": False}
        try:
            entry["alpha_hat"] = regression_estimate(s).alpha_hat
        except (ValueError, EstimatorUndefinedError):
            entry["degenerate"] = True
        record["entries"].append(entry)
    return record


def _pareto_noise_replicate(cfg, rep):
    params = ParetoParams(cfg.alpha, cfg.x_min)
    xs = pareto_sample(params, cfg.n, child_seed(cfg.master_seed, rep, 0))
    xs = apply_noise(xs, cfg.noise, cfg.x_min, child_seed(cfg.master_seed, rep, 1))
    return _record_from_values(cfg, rep, xs)


def _lognormal_replicate(cfg, mu, sigma, rep):
    params = LognormalTailParams(mu=mu, sigma=sigma, x_min=cfg.x_min)
    xs = lognormal_tail_sample(params, cfg.n, child_seed(cfg.master_seed, rep, 0))
    return _record_from_values(cfg, rep, xs)


# ---------------------------------------------------------------------------
# engine

def _workdir_path(workdir, rep):
    return Path(workdir) / f"block_{rep:06d}.json"


def _check_workdir(cfg, workdir):
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    fingerprint = json.dumps(asdict(cfg) | {"workdir": None}, sort_keys=True)
    marker = workdir / "config.json"
    if marker.exists():
        if marker.read_text() != fingerprint:
            raise ValueError(
                f"workdir {workdir} holds blocks for a different configuration"
            )
    else:
        marker.write_text(fingerprint)


def _run_replicates(cfg, worker):
    """Compute (or reload) every replicate record, in replicate order."""
    if cfg.workdir:
        _check_workdir(cfg, cfg.workdir)

    def one(rep):
        if cfg.workdir:
            path = _workdir_path(cfg.workdir, rep)
            if path.exists():
                return json.loads(path.read_text())
        record = worker(cfg, rep)
        if cfg.workdir:
            _workdir_path(cfg.workdir, rep).write_text(json.dumps(record))
        return record

    return map_indexed(one, cfg.replicates, cfg.n_jobs)


def _aggregate(label, cfg, records, noise_kind, sigma):
    treatments = [("mle", lam) for lam in cfg.lambda_grid]
    if cfg.include_regression:
        treatments.append(("regression", 1.0))
    cells = []
    for method, lam in treatments:
        entries = [
            e
            for rec in records
            for e in rec["entries"]
            if e["method"] == method and (method == "regression" or e["lam"] == lam)
        ]
        alphas = np.array([e["alpha_hat"] for e in entries if e["alpha_hat"] is not None])
        verdicts = [e["reject"] for e in entries if e["reject"] is not None]
        valid = alphas.size
        if valid:
            mean = float(alphas.mean())
            sd = float(alphas.std(ddof=0))
            bias = mean - cfg.alpha
            mse = float(np.mean((alphas - cfg.alpha) ** 2))
        else:
            mean = sd = bias = mse = None
        tested = len(verdicts)
        rejections = int(sum(verdicts))
        cells.append(
            CellStats(
                experiment=label,
                method=method,
                lam=float(lam),
                noise_kind=noise_kind,
                sigma=float(sigma),
                n=cfg.n,
                alpha=cfg.alpha,
                replicates=len(records),
                valid=int(valid),
                mean_alpha=mean,
                sd_alpha=sd,
                bias=bias,
                mse=mse,
                tested=tested,
                rejections=rejections,
                rejection_rate=(rejections / tested) if tested else None,
                degenerate=int(sum(e["degenerate"] for e in entries)),
                flagged=valid == 0,
            )
        )
    rows = []
    for rec in records:
        for e in rec["entries"]:
            rows.append(
                {
                    "experiment": label,
                    "rep": rec["rep"],
                    "method": e["method"],
                    "lambda": e["lam"],
                    "noise_kind": noise_kind,
                    "sigma": float(sigma),
                    "n": cfg.n,
                    "alpha_hat": e["alpha_hat"],
                    "p_value": e["p_value"],
                    "reject": e["reject"],
                    "range_r": rec["r"],
                }
            )
    rs = [rec["r"] for rec in records if rec["r"] is not None]
    return SweepResult(
        label=label,
        cells=cells,
        replicates=rows,
        median_r=float(np.median(rs)) if rs else None,
    )


# ---------------------------------------------------------------------------
# public operations

def run_bias_rejection(cfg, label="bias_rejection"):
    """Replicate sweep over the configured binning ratios on power-law data
    with the configured noise: per-replicate fits, verdicts, and aggregates."""
    records = _run_replicates(cfg, _pareto_noise_replicate)
    return _aggregate(label, cfg, records, cfg.noise.kind, cfg.noise.sigma)


def rejection_curve(cfg, label="rejection_curve"):
    """Rejection rate against the binning ratio for one noise treatment."""
    return run_bias_rejection(cfg, label=label)


def expected_median_range(alpha, n, x_min=1.0):
    """Median of max(x)/x_min over n-point power-law samples."""
    return float((1.0 - 0.5 ** (1.0 / n)) ** (-1.0 / alpha))


def default_lambda_grid(alpha, n, points=16):
    """Log-spaced grid from 2 up to the expected median proportional range."""
    top = expected_median_range(alpha, n)
    return tuple(float(l) for l in np.geomspace(2.0, top, points))


def lambda_opt_search(cfg, label="lambda_opt"):
    """Run the ratio sweep and pick the MSE-minimizing binning ratio.

    The grid must span [2, r] for the expected median proportional range r.
    Reports log(lambda_opt)/log(median r), the position of the optimum
    within the data range in log space.
    """
    r_expected = expected_median_range(cfg.alpha, cfg.n, cfg.x_min)
    if cfg.lambda_grid[0] > 2.0 or cfg.lambda_grid[-1] < r_expected:
        raise ValueError(
            f"lambda_grid must span [2, {r_expected:.1f}] (expected median range)"
        )
    curve = run_bias_rejection(cfg, label=label)
    candidates = [
        c for c in curve.cells if c.method == "mle" and not c.flagged and c.mse is not None
    ]
    if not candidates or curve.median_r is None:
        raise LambdaTooLargeError("every grid cell was degenerate")
    best = min(candidates, key=lambda c: c.mse)
    return LambdaOptResult(
        lambda_opt=best.lam,
        log_ratio=math.log(best.lam) / math.log(curve.median_r),
        curve=curve,
    )


def sensitivity_curve(
    sigmas,
    lambda_grid,
    n,
    replicates,
    master_seed,
    *,
    alpha=1.5,
    x_min=1.0,
    gof_mode="quick",
    n_boot=99,
    include_regression=False,
    n_jobs=1,
    workdir=None,
    label="sensitivity",
):
    """Rejection rates on truncated lognormal tails whose log-log slope at
    x_min matches a power law with the given alpha; one curve per sigma."""
    parts = []
    for i, sigma in enumerate(sigmas):
        mu = solve_matching_mu(sigma, alpha, x_min)
        cfg = ExperimentConfig(
            alpha=alpha,
            n=n,
            replicates=replicates,
            lambda_grid=tuple(lambda_grid),
            noise=NoiseSpec(),
            n_boot=n_boot,
            master_seed=int(
                child_seed(master_seed, 1000 + i).generate_state(1, np.uint64)[0]
            ),
            x_min=x_min,
            gof_mode=gof_mode,
            include_regression=include_regression,
            n_jobs=n_jobs,
            workdir=None if workdir is None else str(Path(workdir) / f"sigma_{i}"),
        )
        records = _run_replicates(
            cfg, lambda c, rep: _lognormal_replicate(c, mu, sigma, rep)
        )
        parts.append(_aggregate(label, cfg, records, "lognormal", sigma))
    merged = SweepResult(
        label=label,
        cells=[c for p in parts for c in p.cells],
        replicates=[r for p in parts for r in p.replicates],
        median_r=parts[0].median_r if len(parts) == 1 else None,
    )
    return merged


def lambda_rule_of_n(n, alpha):
    """Sample-size rule n**(1/(3*alpha)), sized to spread data over 3-4 bins."""
    n = check_count(n, "n", minimum=2)
    alpha = check_positive(alpha, "alpha")
    return float(n ** (1.0 / (3.0 * alpha)))


# ---------------------------------------------------------------------------
# noise-tolerance binary search

def _tolerance_batch(alpha, lam, n, kind, sigma, trials, batch_seed, x_min, n_jobs):
    """One independently seeded batch of trials at a candidate sigma."""
    noise = NoiseSpec(kind, sigma)
    params = ParetoParams(alpha, x_min)
    seeds = batch_seed.spawn(trials)

    def one(t):
        sub = seeds[t].spawn(3)
        xs = pareto_sample(params, n, sub[0])
        xs = apply_noise(xs, noise, x_min, sub[1])
        if xs.size == 0:
            return None
        s = Sample(xs, x_min)
        try:
            if lam == 1.0:
                fit = mle_continuous(s)
                g = quick_reject_19_continuous(s, sub[2])
            else:
                b = bin_sample(s, lam)
                fit = mle_binned(b)
                g = quick_reject_19(b, sub[2])
        except (EstimatorUndefinedError, LambdaTooLargeError):
            return None
        return bool(g.reject_at_005), fit.alpha_hat

    outcomes = [r for r in map_indexed(one, trials, n_jobs) if r is not None]
    rejections = sum(r[0] for r in outcomes)
    alphas = [r[1] for r in outcomes]
    return rejections, len(outcomes), float(np.mean(alphas)) if alphas else math.nan


def tolerance_search(
    alpha,
    lam,
    n,
    noise_kind,
    master_seed,
    *,
    target=0.10,
    half_width=0.005,
    rel_window=0.02,
    sigma_max=None,
    batch_initial=200,
    batch_max=32000,
    max_rounds=80,
    x_min=1.0,
    n_jobs=1,
):
    """Stochastic binary search for the noise level at which the quick test
    rejects at the target rate (default 0.10, double the nominal 0.05).

    Terminates once the bracket lies inside sigma_hat*(1 +/- rel_window) and
    the final batch's binomial 95% CI has half-width <= half_width with the
    target inside it. Batches at each candidate are seeded independently and
    grow geometrically as the bracket narrows.
    """
    alpha = check_positive(alpha, "alpha")
    lam = check_ratio(lam, allow_unbinned=True)
    n = check_count(n, "n")
    if noise_kind not in ("additive", "multiplicative"):
        raise ValueError("noise_kind must be 'additive' or 'multiplicative'")
    rule_top = lambda_rule_of_n(n, alpha)
    if lam > rule_top:
        raise ValueError(
            f"lam={lam:g} exceeds the feasible range [1, n**(1/(3*alpha))] = [1, {rule_top:.3f}]"
        )
    if sigma_max is None:
        sigma_max = 1.0 if noise_kind == "additive" else 0.5

    trace = []
    round_idx = 0

    def run(sigma, trials):
        nonlocal round_idx
        batch_seed = child_seed(master_seed, round_idx)
        round_idx += 1
        rej, tested, mean_alpha = _tolerance_batch(
            alpha, lam, n, noise_kind, sigma, trials, batch_seed, x_min, n_jobs
        )
        rate = rej / tested if tested else math.nan
        ci = 1.96 * math.sqrt(rate * (1.0 - rate) / tested) if tested else math.inf
        trace.append(
            {"sigma": sigma, "rejection_rate": rate, "trials": tested, "ci_halfwidth": ci}
        )
        return rate, ci, mean_alpha

    rate_hi, ci_hi, _ = run(sigma_max, batch_initial)
    if rate_hi + 3.0 * ci_hi < target:
        raise BracketingError(
            f"rejection rate at sigma_max={sigma_max:g} is {rate_hi:.3f}, "
            f"below the target {target:g}; no bracket"
        )

    lo, hi = 0.0, float(sigma_max)
    n_final = math.ceil(1.96**2 * target * (1.0 - target) / half_width**2)
    for _ in range(max_rounds):
        mid = 0.5 * (lo + hi)
        width = hi - lo
        in_window = width <= 2.0 * rel_window * mid
        if not in_window:
            trials = batch_initial if width > 8.0 * rel_window * mid else 16 * batch_initial
        else:
            trials = min(batch_max, n_final)
        rate, ci, mean_alpha = run(mid, trials)
        if in_window and ci <= half_width and abs(rate - target) <= half_width:
            return ToleranceResult(
                kind=noise_kind,
                alpha=alpha,
                lam=lam,
                n=n,
                target=target,
                sigma_hat=mid,
                mean_alpha_hat=mean_alpha,
                rejection_rate=rate,
                trials=trace[-1]["trials"],
                trace=trace,
                master_seed=int(master_seed),
            )
        if rate < target:
            lo = mid
            if in_window:
                # a cheap early round may have pinned hi below the root; relax it
                hi = max(hi, mid * (1.0 + 4.0 * rel_window))
        else:
            hi = mid
            if in_window:
                lo = min(lo, mid * (1.0 - 4.0 * rel_window))
        if in_window and ci > half_width:
            n_final = min(
                batch_max,
                math.ceil(1.1 * 1.96**2 * rate * (1.0 - rate) / half_width**2),
            )
    raise BracketingError(f"tolerance search did not converge in {max_rounds} rounds")


# ---------------------------------------------------------------------------
# result tables

CELL_COLUMNS = (
    "experiment", "method", "lambda", "noise_kind", "sigma", "n", "alpha",
    "replicates", "valid", "mean_alpha", "sd_alpha", "bias", "mse",
    "tested", "rejections", "rejection_rate", "degenerate", "flagged",
)

REPLICATE_COLUMNS = (
    "experiment", "rep", "method", "lambda", "noise_kind", "sigma", "n",
    "alpha_hat", "p_value", "reject", "range_r",
)


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path, columns, rows):
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_csv_value(row.get(c)) for c in columns))
    Path(path).write_text("\n".join(lines) + "\n")


def cell_rows(results):
    rows = []
    for res in results:
        for c in res.cells:
            row = asdict(c)
            row["lambda"] = row.pop("lam")
            rows.append(row)
    return rows


def write_cells_csv(results, path):
    """Aggregate table, one row per (experiment, method, lambda, sigma, n)."""
    _write_csv(path, CELL_COLUMNS, cell_rows(results))


def write_replicates_csv(results, path):
    """Raw per-replicate estimates and verdicts behind the aggregates."""
    rows = [row for res in results for row in res.replicates]
    _write_csv(path, REPLICATE_COLUMNS, rows)
