"""Empirical distributions, KS distance, quantiles and spread diagnostics.

Quantiles use linear interpolation between order statistics at position
``(N - 1) q`` (Hyndman-Fan type 7) everywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import InsufficientDataError, InvalidInputError

MIN_IQR_SAMPLES = 50


@dataclass(frozen=True)
class EmpiricalDistribution:
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.sort(np.asarray(self.samples, dtype=float).ravel())
        if s.size < 1:
            raise InvalidInputError("empirical distribution needs at least one sample")
        object.__setattr__(self, "samples", s)

    @property
    def count(self) -> int:
        return self.samples.size

    def cdf(self, x) -> np.ndarray:
        return np.searchsorted(self.samples, x, side="right") / self.count


def _emp(x) -> EmpiricalDistribution:
    return x if isinstance(x, EmpiricalDistribution) else EmpiricalDistribution(x)


def ks_distance(emp, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """One-sample Kolmogorov-Smirnov statistic ``sup |F_N - F|``.

    Evaluated at the order statistics as
    ``max_i max(|i/N - F(x_(i))|, |(i-1)/N - F(x_(i))|)``.
    """
    e = _emp(emp)
    n = e.count
    f = np.asarray(cdf(e.samples), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(np.abs(i / n - f)), np.max(np.abs((i - 1) / n - f))))


def quantile(emp, q: float) -> float:
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise InvalidInputError(f"quantile level must be in [0, 1], got {q}")
    s = _emp(emp).samples
    pos = (s.size - 1) * q
    lo = int(np.floor(pos))
    hi = min(lo + 1, s.size - 1)
    frac = pos - lo
    if frac == 0.0:
        return float(s[lo])
    return float(s[lo] + frac * (s[hi] - s[lo]))


def iqr(emp) -> float:
    return quantile(emp, 0.75) - quantile(emp, 0.25)


def iqr_ratio_report(stat_samples_by_n: Mapping[int, object]) -> dict[int, float]:
    """IQR at each order divided by the IQR at the smallest order."""
    if len(stat_samples_by_n) < 1:
        raise InsufficientDataError("no orders supplied")
    for n, s in stat_samples_by_n.items():
        if np.size(s) < MIN_IQR_SAMPLES:
            raise InsufficientDataError(
                f"order {n} has {np.size(s)} samples; at least {MIN_IQR_SAMPLES} are needed"
            )
    orders = sorted(stat_samples_by_n)
    base = iqr(stat_samples_by_n[orders[0]])
    if base == 0:
        raise InsufficientDataError(f"IQR at order {orders[0]} is zero")
    return {n: iqr(stat_samples_by_n[n]) / base for n in orders}
