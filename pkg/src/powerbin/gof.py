"""Goodness of fit for power-law tails, binned and continuous.

The K-S statistic for binned data compares the empirical bin CDF against the
discrete power law; its null distribution is approximated by a
Lilliefors-style parametric bootstrap (draw from the fitted null, refit,
recompute D). A quick 19-draw variant answers only "is p < 0.05". Utilities
based on the probability that a bootstrap draw occupies fewer than three bins
bound the usable binning ratio.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketingError, LambdaTooLargeError
from .estimation import mle_binned, mle_continuous
from .parallelism import map_indexed
from .sampling import ParetoParams, discrete_powerlaw_indices
from .seeding import child_seed, rng_from
from .validation import check_count, check_positive, check_ratio

# redraw budget per bootstrap replicate before declaring the ratio infeasible
MAX_REDRAWS = 64


@dataclass(frozen=True)
class DiscretePowerLaw:
    """Distribution of bin indices of power-law data: pmf proportional to
    lam**(-alpha*k), i.e. geometric with success probability 1 - lam**-alpha."""

    alpha: float
    lam: float
    x_min: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_positive(self.alpha, "alpha"))
        object.__setattr__(self, "lam", check_ratio(self.lam))
        object.__setattr__(self, "x_min", check_positive(self.x_min, "x_min"))

    def pmf(self, k):
        k = self._check_k(k)
        p0 = 1.0 - self.lam**-self.alpha
        out = p0 * np.exp(-self.alpha * math.log(self.lam) * k)
        return out if out.ndim else float(out)

    def cdf(self, k):
        k = self._check_k(k)
        out = 1.0 - np.exp(-self.alpha * math.log(self.lam) * (k + 1.0))
        return out if out.ndim else float(out)

    @staticmethod
    def _check_k(k):
        k = np.asarray(k, dtype=float)
        if np.any(k < 0):
            raise ValueError("bin index k must be >= 0")
        return k


@dataclass
class GofResult:
    """K-S distance with its bootstrap verdict. p_value is None for the
    quick test, which only decides whether p < 0.05."""

    d_stat: float
    p_value: float | None
    reject_at_005: bool
    n_bootstrap: int
    n_degenerate: int = 0

    def as_dict(self):
        return {
            "d_stat": self.d_stat,
            "p_value": self.p_value,
            "reject_at_005": self.reject_at_005,
            "n_bootstrap": self.n_bootstrap,
            "n_degenerate": self.n_degenerate,
        }


def _ks_from_counts(counts, n, alpha, lam):
    # counts is dense over k = 0..k_max; discrepancy beyond k_max is
    # 1 - cdf(k), largest at k_max, so stopping there is exact
    ecdf = np.cumsum(counts) / n
    ks = np.arange(1.0, counts.size + 1.0)
    cdf = 1.0 - np.exp(-alpha * math.log(lam) * ks)
    return float(np.max(np.abs(ecdf - cdf)))


def ks_binned(b, dpl):
    """K-S distance between binned counts and a discrete power law."""
    if b.lam != dpl.lam or b.x_min != dpl.x_min:
        raise ValueError("binning ratio / threshold mismatch between data and model")
    return _ks_from_counts(b.count_array(), b.n, dpl.alpha, dpl.lam)


def ks_continuous(s, params):
    """Two-sided K-S distance between raw values and a Pareto tail."""
    xs = np.sort(s.values)
    n = xs.size
    cdf = 1.0 - (xs / params.x_min) ** -params.alpha
    i = np.arange(1.0, n + 1.0)
    d = max(np.max(i / n - cdf), np.max(cdf - (i - 1.0) / n))
    return float(min(max(d, 0.0), 1.0))


def _replicate_seeds(seed, n):
    if isinstance(seed, np.random.SeedSequence):
        return seed.spawn(n)
    return [child_seed(seed, i) for i in range(n)]


def _binned_boot_ds(alpha_hat, lam, n, n_boot, seed, n_jobs=1):
    """Bootstrap K-S distances under the fitted discrete power law.

    Single-bin draws leave the refit undefined; they are redrawn from the
    replicate's own stream and counted, so results do not depend on worker
    scheduling. More than n_boot degenerate draws in total (over half of all
    attempts) aborts.
    """
    log_lam = math.log(lam)
    seeds = _replicate_seeds(seed, n_boot)

    def one(i):
        rng = rng_from(seeds[i])
        redraws = 0
        while True:
            ks = discrete_powerlaw_indices(alpha_hat, lam, n, rng)
            mean_k = ks.mean()
            if mean_k > 0.0:
                break
            redraws += 1
            if redraws >= MAX_REDRAWS:
                raise LambdaTooLargeError(
                    "binning ratio too large for sample size: bootstrap draws "
                    "keep collapsing to a single bin"
                )
        refit = math.log1p(1.0 / mean_k) / log_lam
        d = _ks_from_counts(np.bincount(ks), n, refit, lam)
        return d, redraws

    results = map_indexed(one, n_boot, n_jobs)
    ds = np.array([r[0] for r in results])
    n_degenerate = int(sum(r[1] for r in results))
    if n_degenerate > n_boot:
        raise LambdaTooLargeError(
            "binning ratio too large for sample size: more than half of "
            "bootstrap draws were single-bin"
        )
    return ds, n_degenerate


def _continuous_boot_ds(alpha_hat, n, n_boot, seed, n_jobs=1):
    seeds = _replicate_seeds(seed, n_boot)

    def one(i):
        rng = rng_from(seeds[i])
        logs = -np.log(1.0 - rng.random(n)) / alpha_hat  # ln(x/x_min)
        refit = 1.0 / logs.mean()
        logs.sort()
        cdf = 1.0 - np.exp(-refit * logs)
        idx = np.arange(1.0, n + 1.0)
        return float(max(np.max(idx / n - cdf), np.max(cdf - (idx - 1.0) / n)))

    return np.array(map_indexed(one, n_boot, n_jobs)), 0


def _pvalue_result(d_obs, ds, n_boot, n_degenerate):
    exceed = int(np.sum(ds >= d_obs))
    p = (1.0 + exceed) / (n_boot + 1.0)
    return GofResult(
        d_stat=d_obs,
        p_value=p,
        reject_at_005=p < 0.05,
        n_bootstrap=n_boot,
        n_degenerate=n_degenerate,
    )


def _quick_result(d_obs, ds, n_degenerate):
    return GofResult(
        d_stat=d_obs,
        p_value=None,
        reject_at_005=bool(d_obs > ds.max()),
        n_bootstrap=ds.size,
        n_degenerate=n_degenerate,
    )


def bootstrap_pvalue(b, n_boot, seed, n_jobs=1):
    """Bootstrap p-value for binned data against the fitted discrete power law.

    Fits the exponent, then repeatedly draws size-n samples from the fitted
    null, refits on each draw, and recomputes D; ties count as extreme and
    p = (1 + #{D_boot >= D_obs}) / (n_boot + 1) so p is never zero.
    """
    n_boot = check_count(n_boot, "n_boot", minimum=19)
    fit = mle_binned(b)
    d_obs = ks_binned(b, DiscretePowerLaw(fit.alpha_hat, b.lam, b.x_min))
    ds, n_deg = _binned_boot_ds(fit.alpha_hat, b.lam, b.n, n_boot, seed, n_jobs)
    return _pvalue_result(d_obs, ds, n_boot, n_deg)


def quick_reject_19(b, seed, n_jobs=1):
    """Decide p < 0.05 from 19 bootstrap draws: reject iff the observed D
    exceeds all of them."""
    fit = mle_binned(b)
    d_obs = ks_binned(b, DiscretePowerLaw(fit.alpha_hat, b.lam, b.x_min))
    ds, n_deg = _binned_boot_ds(fit.alpha_hat, b.lam, b.n, 19, seed, n_jobs)
    return _quick_result(d_obs, ds, n_deg)


def bootstrap_pvalue_continuous(s, n_boot, seed, n_jobs=1):
    """Unbinned analogue of bootstrap_pvalue: continuous K-S against the
    fitted Pareto tail, resampling from it."""
    n_boot = check_count(n_boot, "n_boot", minimum=19)
    fit = mle_continuous(s)
    d_obs = ks_continuous(s, ParetoParams(fit.alpha_hat, s.x_min))
    ds, n_deg = _continuous_boot_ds(fit.alpha_hat, s.n, n_boot, seed, n_jobs)
    return _pvalue_result(d_obs, ds, n_boot, n_deg)


def quick_reject_19_continuous(s, seed, n_jobs=1):
    fit = mle_continuous(s)
    d_obs = ks_continuous(s, ParetoParams(fit.alpha_hat, s.x_min))
    ds, n_deg = _continuous_boot_ds(fit.alpha_hat, s.n, 19, seed, n_jobs)
    return _quick_result(d_obs, ds, n_deg)


def few_bin_probability(alpha, lam, x_min, n):
    """Probability that an n-sample from the power-law tail spans fewer than
    three bins, i.e. max x < x_min*lam**2: (1 - lam**(-2*alpha))**n.
    The threshold cancels, so the value does not depend on x_min."""
    alpha = check_positive(alpha, "alpha")
    lam = check_ratio(lam, allow_unbinned=True)
    check_positive(x_min, "x_min")
    n = check_count(n, "n")
    return float((1.0 - lam ** (-2.0 * alpha)) ** n)


def lambda_upper_limit(alpha, x_min, n, tol, lam_max=1e9):
    """Largest usable binning ratio: the lam at which the few-bin probability
    reaches the tolerable fraction tol, found by monotone bisection."""
    alpha = check_positive(alpha, "alpha")
    x_min = check_positive(x_min, "x_min")
    n = check_count(n, "n")
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must be inside (0, 1), got {tol}")
    if few_bin_probability(alpha, lam_max, x_min, n) < tol:
        raise BracketingError(
            f"no binning ratio at or below lam_max={lam_max:g} reaches a "
            f"few-bin probability of {tol:g}; cap hit"
        )
    lo, hi = 1.0, float(lam_max)
    while hi - lo > 1e-13 * hi:
        mid = 0.5 * (lo + hi)
        if few_bin_probability(alpha, mid, x_min, n) < tol:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
