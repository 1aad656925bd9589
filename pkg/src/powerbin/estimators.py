"""Scikit-learn style wrappers so the estimators compose with pipelines.

The functional API (``estimation``, ``binning``) stays the primary surface;
these classes adapt it to the fit/transform idiom and inherit
``get_params``/``set_params`` from ``BaseEstimator``.
"""

from sklearn.base import BaseEstimator, TransformerMixin

from .binning import Sample, floor_values
from .estimation import fit_exponent, regression_estimate
from .validation import check_positive, check_ratio, check_values


class LogBinner(TransformerMixin, BaseEstimator):
    """Floor values to the lower edge of their logarithmic bin.

    Parameters
    ----------
    lam : float, default=2.0
        Ratio between adjacent bin boundaries, > 1.
    x_min : float, default=1.0
        Lower threshold anchoring the bins.
    """

    def __init__(self, lam=2.0, x_min=1.0):
        self.lam = lam
        self.x_min = x_min

    def fit(self, X, y=None):
        check_ratio(self.lam)
        check_positive(self.x_min, "x_min")
        check_values(X, self.x_min, name="X")
        return self

    def transform(self, X):
        self.fit(X)
        return floor_values(check_values(X, self.x_min, name="X"), self.x_min, self.lam)


class PowerLawMLE(BaseEstimator):
    """Maximum-likelihood tail-exponent estimator.

    Parameters
    ----------
    lam : float, default=1.0
        Binning ratio; 1 fits the raw values, > 1 fits logarithmically
        binned counts.
    x_min : float, default=1.0
        Lower threshold of the tail; inputs below it are rejected.

    Attributes
    ----------
    alpha_ : float
        Estimated exponent.
    std_err_ : float
        Standard error from the observed Fisher information.
    n_ : int
        Number of observations used.
    result_ : FitResult
        Full fit record.
    """

    def __init__(self, lam=1.0, x_min=1.0):
        self.lam = lam
        self.x_min = x_min

    def fit(self, X, y=None):
        check_ratio(self.lam, allow_unbinned=True)
        x_min = check_positive(self.x_min, "x_min")
        sample = Sample(check_values(X, x_min, name="X"), x_min)
        self.result_ = fit_exponent(sample, self.lam)
        self.alpha_ = self.result_.alpha_hat
        self.std_err_ = self.result_.std_err
        self.n_ = self.result_.n
        return self


class PowerLawRegression(BaseEstimator):
    """Tail-exponent estimate by OLS on the empirical CDF in log-log space."""

    def __init__(self, x_min=1.0):
        self.x_min = x_min

    def fit(self, X, y=None):
        x_min = check_positive(self.x_min, "x_min")
        sample = Sample(check_values(X, x_min, name="X"), x_min)
        self.result_ = regression_estimate(sample)
        self.alpha_ = self.result_.alpha_hat
        self.std_err_ = self.result_.std_err
        self.n_ = self.result_.n
        return self
