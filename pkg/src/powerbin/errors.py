"""Exception types shared across the package."""


class EstimatorUndefinedError(ValueError):
    """Raised when the exponent estimator has no solution on the given data,
    e.g. every observation sits in bin zero or exactly at the threshold."""


class LambdaTooLargeError(RuntimeError):
    """Raised when more than half of bootstrap draws collapse to a single
    occupied bin, i.e. the binning ratio is too large for the sample size."""


class BracketingError(RuntimeError):
    """Raised when a root or threshold search cannot bracket a solution."""
