"""Logarithmic binning of threshold-limited samples.

Bins are [x_min*lam**k, x_min*lam**(k+1)) for k = 0, 1, 2, ... so the bin
index is a floor operation in log_lam space. The canonical bin edges are the
float64 products x_min*lam**k; index computation first guesses k from
floating logs, then corrects against the edges themselves, and finally
treats values within EDGE_SNAP (relative) of a bin's upper edge as sitting
on that edge. The snap matters for quantized data: magnitudes converted as
10**m drift a few ulp below the ladder x_min*lam**k, and without it adjacent
magnitude classes can merge into one bin (e.g. Richter data at
lam = 10**0.1, x_min = 10**3.5).
"""

from dataclasses import dataclass, field

import numpy as np

from .validation import check_positive, check_ratio, check_values

# values this close (relative) to a bin's upper edge count as the edge
EDGE_SNAP = 1e-13


@dataclass
class Sample:
    """Raw positive observations with their declared lower threshold."""

    values: np.ndarray
    x_min: float

    def __post_init__(self):
        self.x_min = check_positive(self.x_min, "x_min")
        self.values = check_values(self.values, self.x_min)

    @property
    def n(self):
        return self.values.size


@dataclass
class BinnedSample:
    """Sparse per-bin counts of a logarithmically binned sample."""

    lam: float
    x_min: float
    counts: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.lam = check_ratio(self.lam)
        self.x_min = check_positive(self.x_min, "x_min")
        if not self.counts:
            raise ValueError("counts must be nonempty")
        clean = {}
        for k, c in self.counts.items():
            if int(k) < 0:
                raise ValueError(f"bin index must be >= 0, got {k}")
            if int(c) <= 0:
                raise ValueError(f"bin counts must be positive, got {c} at k={k}")
            clean[int(k)] = int(c)
        self.counts = clean

    @classmethod
    def from_indices(cls, indices, lam, x_min):
        ks, cs = np.unique(np.asarray(indices, dtype=np.int64), return_counts=True)
        return cls(lam=lam, x_min=x_min, counts=dict(zip(ks.tolist(), cs.tolist())))

    @property
    def n(self):
        return sum(self.counts.values())

    @property
    def k_max(self):
        return max(self.counts)

    @property
    def mean_k(self):
        return sum(k * c for k, c in self.counts.items()) / self.n

    def count_array(self):
        """Dense counts for k = 0 .. k_max."""
        dense = np.zeros(self.k_max + 1, dtype=np.int64)
        for k, c in self.counts.items():
            dense[k] = c
        return dense


@dataclass
class RangeStats:
    """Proportional range r = max/x_min and the occupied-bin budget it allows."""

    r: float
    n_bins: int


def bin_edge(x_min, lam, k):
    """Lower edge of bin k, the canonical float64 product x_min*lam**k."""
    return x_min * np.power(lam, float(k))


def bin_indices(values, x_min, lam):
    """Vectorized bin index with edge correction; values must be >= x_min."""
    x_min = check_positive(x_min, "x_min")
    lam = check_ratio(lam)
    values = check_values(values, x_min)
    with np.errstate(divide="ignore"):
        k = np.floor(np.log(values / x_min) / np.log(lam)).astype(np.int64)
    np.clip(k, 0, None, out=k)
    # float logs can be off by one at bin edges; settle against the edges
    while True:
        low = x_min * np.power(lam, k.astype(float))
        mask = values < low
        if not mask.any():
            break
        k[mask] -= 1
    while True:
        high = x_min * np.power(lam, (k + 1).astype(float))
        mask = values >= high
        if not mask.any():
            break
        k[mask] += 1
    # snap near-edge values up: quantized inputs drift a few ulp under the
    # pow ladder and must not fall into the bin below their own edge
    high = x_min * np.power(lam, (k + 1).astype(float))
    k[values >= high * (1.0 - EDGE_SNAP)] += 1
    return k


def bin_index(x, x_min, lam):
    """Index k of the bin [x_min*lam**k, x_min*lam**(k+1)) containing x."""
    return int(bin_indices(np.asarray([x], dtype=float), x_min, lam)[0])


def floor_values(values, x_min, lam):
    """Round values down to the lower edge of their bin (x_min*lam**k)."""
    k = bin_indices(values, x_min, lam)
    return x_min * np.power(lam, k.astype(float))


def bin_sample(s, lam):
    """Bin a Sample, preserving the total count."""
    ks = bin_indices(s.values, s.x_min, lam)
    return BinnedSample.from_indices(ks, lam=lam, x_min=s.x_min)


def range_stats(s, lam):
    """Proportional range and number of bins needed to cover the sample."""
    lam = check_ratio(lam)
    top = float(np.max(s.values))
    return RangeStats(r=top / s.x_min, n_bins=bin_index(top, s.x_min, lam) + 1)
