"""Input validation helpers used by the estimators and the functional API."""

import numbers

import numpy as np


def check_positive(value, name):
    """Return ``value`` as a float, requiring it to be finite and > 0."""
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)


def check_nonnegative(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be a nonnegative finite number, got {value!r}")
    return float(value)


def check_ratio(lam, allow_unbinned=False):
    """Validate a binning ratio: > 1, or >= 1 when 1 encodes unbinned data."""
    lam = check_positive(lam, "lam")
    if allow_unbinned:
        if lam < 1.0:
            raise ValueError(f"lam must be >= 1, got {lam}")
    elif lam <= 1.0:
        raise ValueError(f"lam must be > 1, got {lam}")
    return lam


def check_count(value, name, minimum=1):
    if not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_values(values, x_min, name="values"):
    """Coerce to a 1-D float array of finite values all >= x_min."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    if np.any(arr < x_min):
        raise ValueError(f"all {name} must be >= x_min={x_min}")
    return arr
