"""Reproducible samplers for validation studies.

Covers the continuous power-law tail, its logarithmically binned (discrete)
counterpart, truncated lognormal tails used as a look-alike alternative, and
additive/multiplicative measurement noise.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect
from scipy.special import log_ndtr, ndtri

from .binning import BinnedSample
from .errors import BracketingError
from .seeding import rng_from
from .validation import check_count, check_nonnegative, check_positive, check_ratio

NOISE_KINDS = ("none", "additive", "multiplicative")

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ParetoParams:
    """Tail exponent alpha and lower threshold x_min of a power-law tail."""

    alpha: float
    x_min: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_positive(self.alpha, "alpha"))
        object.__setattr__(self, "x_min", check_positive(self.x_min, "x_min"))


@dataclass(frozen=True)
class NoiseSpec:
    """Measurement-noise model: additive sigma is in units of x_min,
    multiplicative sigma is a dimensionless log-ratio."""

    kind: str = "none"
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"noise kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "sigma", check_nonnegative(self.sigma, "sigma"))
        if self.kind == "none" and self.sigma != 0.0:
            raise ValueError("noise kind 'none' requires sigma == 0")


@dataclass(frozen=True)
class LognormalTailParams:
    """Lognormal(mu, sigma**2) conditioned on values >= x_min."""

    mu: float
    sigma: float
    x_min: float

    def __post_init__(self):
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "sigma", check_positive(self.sigma, "sigma"))
        object.__setattr__(self, "x_min", check_positive(self.x_min, "x_min"))


def pareto_sample(params, n, seed):
    """Draw n values by inverse transform x = x_min * u**(-1/alpha), u in (0,1]."""
    n = check_count(n, "n")
    rng = rng_from(seed)
    u = 1.0 - rng.random(n)
    return params.x_min * u ** (-1.0 / params.alpha)


def apply_noise(xs, spec, x_min, seed):
    """Corrupt a sample with measurement noise and drop values below x_min.

    Additive noise adds Normal(0, (sigma*x_min)**2); multiplicative noise
    multiplies by Lognormal(0, sigma**2). Values pushed below the threshold
    are removed, not clamped, so the result can be shorter than the input
    (or empty).
    """
    x_min = check_positive(x_min, "x_min")
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size == 0:
        raise ValueError("xs must be a nonempty 1-D array")
    if spec.kind == "none" or spec.sigma == 0.0:
        return xs.copy()
    rng = rng_from(seed)
    g = rng.standard_normal(xs.size)
    if spec.kind == "additive":
        out = xs + spec.sigma * x_min * g
    else:
        out = xs * np.exp(spec.sigma * g)
    return out[out >= x_min]


def discrete_powerlaw_indices(alpha, lam, n, rng):
    """Bin indices k = floor(ln u / (-alpha ln lam)), u in (0,1]; geometric
    with success probability 1 - lam**-alpha."""
    u = 1.0 - rng.random(n)
    return np.floor(np.log(u) / (-alpha * np.log(lam))).astype(np.int64)


def discrete_powerlaw_sample(alpha, lam, x_min, n, seed):
    """Draw a binned sample of size n from the discrete power law."""
    alpha = check_positive(alpha, "alpha")
    lam = check_ratio(lam)
    x_min = check_positive(x_min, "x_min")
    n = check_count(n, "n")
    ks = discrete_powerlaw_indices(alpha, lam, n, rng_from(seed))
    return BinnedSample.from_indices(ks, lam=lam, x_min=x_min)


def lognormal_tail_sample(params, n, seed):
    """Inverse-CDF sampling of the conditional distribution above x_min."""
    n = check_count(n, "n")
    rng = rng_from(seed)
    z_min = (math.log(params.x_min) - params.mu) / params.sigma
    tail = math.exp(log_ndtr(-z_min))
    if tail == 0.0:
        raise ValueError("truncation threshold is too deep in the lognormal tail")
    u = 1.0 - rng.random(n)
    z = -ndtri(u * tail)
    return np.maximum(np.exp(params.mu + params.sigma * z), params.x_min)


def _normal_hazard(z):
    # phi(z) / Phi(-z), stable for large |z|
    return math.exp(-0.5 * z * z - _LOG_SQRT_2PI - log_ndtr(-z))


def log_survival_slope(params, x):
    """d ln S / d ln x of the lognormal survival function at x."""
    z = (math.log(x) - params.mu) / params.sigma
    return -_normal_hazard(z) / params.sigma


def solve_matching_mu(sigma, alpha, x_min):
    """Log-mean mu at which the lognormal tail's log-log slope at x_min
    equals -alpha, i.e. x_min*f(x_min)/S(x_min) = alpha.

    Bisection on a bracket expanded geometrically from mu = ln x_min;
    the residual is strictly decreasing in mu, so the root is unique.
    """
    sigma = check_positive(sigma, "sigma")
    alpha = check_positive(alpha, "alpha")
    x_min = check_positive(x_min, "x_min")

    def residual(mu):
        z = (math.log(x_min) - mu) / sigma
        return _normal_hazard(z) / sigma - alpha

    mu0 = math.log(x_min)
    step = sigma
    lo = hi = mu0
    for _ in range(200):
        if residual(lo) > 0:
            break
        lo = mu0 - step
        step *= 2.0
    else:
        raise BracketingError("could not bracket matching mu from below")
    step = sigma
    for _ in range(200):
        if residual(hi) < 0:
            break
        hi = mu0 + step
        step *= 2.0
    else:
        raise BracketingError("could not bracket matching mu from above")
    return float(bisect(residual, lo, hi, xtol=1e-12, rtol=1e-12))
