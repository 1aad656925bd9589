import math

import numpy as np
import pytest

from powerbin import (
    BinnedSample,
    ParetoParams,
    Sample,
    bin_sample,
    discrete_powerlaw_sample,
    fit_exponent,
    mle_binned,
    mle_continuous,
    mle_variance,
    pareto_sample,
    regression_estimate,
)
from powerbin.errors import EstimatorUndefinedError


def test_mle_binned_hand_case():
    b = BinnedSample(lam=2.0, x_min=1.0, counts={1: 40})
    fit = mle_binned(b)
    assert fit.alpha_hat == pytest.approx(1.0)
    assert fit.method == "mle_binned"
    assert fit.n == 40


def test_mle_continuous_hand_case():
    s = Sample(np.full(3, math.e), 1.0)
    fit = mle_continuous(s)
    assert fit.alpha_hat == pytest.approx(1.0)
    assert fit.std_err == pytest.approx(1.0 / math.sqrt(3))


def test_mle_undefined_cases():
    with pytest.raises(EstimatorUndefinedError):
        mle_binned(BinnedSample(lam=2.0, x_min=1.0, counts={0: 100}))
    with pytest.raises(EstimatorUndefinedError):
        mle_continuous(Sample(np.full(5, 3.0), 3.0))


def test_variance_limit_and_values():
    # analytic lam -> 1 limit and direct evaluations of the Fisher inverse
    assert mle_variance(1.5, 1.0, 500) == pytest.approx(0.0045)
    rel = abs(mle_variance(1.5, 1.0 + 1e-8, 500) - 0.0045) / 0.0045
    assert rel < 1e-4
    assert mle_variance(1.5, 2.0, 1) == pytest.approx(2.4601375807805836, rel=1e-12)
    assert mle_variance(1.5, 4.0, 1) == pytest.approx(3.1870962521648374, rel=1e-12)
    ratio = mle_variance(1.5, 4.0, 100) / mle_variance(1.5, 2.0, 100)
    assert ratio == pytest.approx(1.295495128834866, rel=1e-12)


def test_variance_polynomial_growth():
    # large-lam variance grows like lam**alpha (O(lam**2alpha) in sd**2 terms
    # after the (lam**a - 1)**2 / lam**a simplification)
    v1 = mle_variance(1.5, 100.0, 1)
    v2 = mle_variance(1.5, 400.0, 1)
    growth = v2 / v1
    ideal = (400 / 100) ** 1.5 * (math.log(100) / math.log(400)) ** 2
    assert growth == pytest.approx(ideal, rel=0.05)


def test_binned_converges_to_continuous():
    xs = pareto_sample(ParetoParams(1.5, 1.0), 2000, 3)
    s = Sample(xs, 1.0)
    a1 = mle_continuous(s).alpha_hat
    a_close = mle_binned(bin_sample(s, 1.0 + 1e-6)).alpha_hat
    assert a_close == pytest.approx(a1, rel=1e-4)  # 4 significant digits
    # the gap shrinks like (lam - 1); below that it jitters with the bin
    # quantization of this particular sample, so allow that much slack
    gaps = [
        abs(mle_binned(bin_sample(s, lam)).alpha_hat - a1)
        for lam in (1.1, 1.01, 1.001, 1.0001)
    ]
    assert all(b < a + 5e-6 for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < gaps[0]
    assert gaps[-1] < 1e-5 * a1


def test_fit_exponent_dispatch():
    xs = pareto_sample(ParetoParams(1.5, 1.0), 500, 4)
    s = Sample(xs, 1.0)
    assert fit_exponent(s, 1.0).method == "mle_continuous"
    assert fit_exponent(s, 2.0).method == "mle_binned"


def test_consistency_on_discrete_samples():
    b = discrete_powerlaw_sample(1.5, 2.0, 1.0, 100_000, 5)
    assert mle_binned(b).alpha_hat == pytest.approx(1.5, rel=0.005)


def test_scale_equivariance():
    xs = pareto_sample(ParetoParams(1.5, 1.0), 1000, 6)
    c = 137.5
    for fitter in (mle_continuous, regression_estimate):
        f1 = fitter(Sample(xs, 1.0))
        f2 = fitter(Sample(c * xs, c))
        assert f2.alpha_hat == pytest.approx(f1.alpha_hat, rel=1e-12)
        assert f2.std_err == pytest.approx(f1.std_err, rel=1e-12)
    b1 = mle_binned(bin_sample(Sample(xs, 1.0), 2.0))
    b2 = mle_binned(bin_sample(Sample(c * xs, c), 2.0))
    assert b2.alpha_hat == pytest.approx(b1.alpha_hat, rel=1e-12)


def test_regression_exact_quantile_grid():
    # the inverse-CDF grid matching the midpoint quantile convention is
    # exactly log-linear, so the slope recovers alpha
    n, alpha = 1000, 1.5
    i = np.arange(1, n + 1)
    xs = (1.0 - (i - 0.5) / n) ** (-1 / alpha)
    fit = regression_estimate(Sample(xs, 1.0))
    assert fit.alpha_hat == pytest.approx(alpha, rel=0.01)
    assert fit.alpha_hat == pytest.approx(alpha, rel=1e-9)  # exact grid
    assert fit.method == "regression"
    assert fit.n == n


def test_regression_validation():
    with pytest.raises(ValueError):
        regression_estimate(Sample(np.array([1.0, 2.0]), 1.0))
    with pytest.raises(ValueError):
        regression_estimate(Sample(np.full(10, 2.0), 1.0))


def test_variance_validation():
    with pytest.raises(ValueError):
        mle_variance(1.5, 0.99, 10)
    with pytest.raises(ValueError):
        mle_variance(-1.0, 2.0, 10)
    with pytest.raises(ValueError):
        mle_variance(1.5, 2.0, 0)
