"""Trace statistics of distance minors and the one-sided 1/2-stable limit.

For a sample ``x_1..x_n`` on the line, ``tr M_n^2 / 2 = sum_{i<j} (x_i - x_j)^2
= n sum x_i^2 - (sum x_i)^2``.  Under the standard Cauchy measure ``x_i^2`` has
tail ``P(x^2 > t) = 1 - (2/pi) arctan(sqrt t) ~ (2/pi) t^(-1/2)``, so
``T_n = tr M_n^2 / (2 n^3)`` has a nondegenerate 1/2-stable (Levy) limit whose
scale is calibrated empirically.

The standard Levy law is sampled as ``1 / Z^2`` with ``Z`` standard normal and
has CDF ``erfc(1 / sqrt(2 x))``.  It has no mean, so only quantile-based
summaries are used for it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import erfc, ndtri

from .eig import frobenius_sq
from .errors import (
    InsufficientDataError,
    InvalidInputError,
    NumericDegeneracyError,
    UnsupportedTripleError,
)
from .inference import ks_distance, quantile
from .matdist import DistanceMinor, sample_minor
from .triples import MetricTriple, get_triple, sample_points

# median of 1/Z^2 is 1/q^2 with q the upper quartile of |Z|, i.e. Phi^{-1}(3/4)
LEVY_MEDIAN = 1.0 / float(ndtri(0.75)) ** 2
MIN_CALIBRATION = 100


@dataclass(frozen=True)
class TraceStat:
    n: int
    value: float
    sum_sq: float | None = None
    sum: float | None = None


def trace_value_from_line(x) -> TraceStat:
    """``T_n`` for points on a Euclidean line, in O(n) from power sums."""
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if n < 1:
        raise InvalidInputError("need at least one point")
    s1 = float(np.sum(x))
    s2 = float(np.dot(x, x))
    half_trace = n * s2 - s1 * s1
    return TraceStat(n, max(half_trace, 0.0) / n**3, s2, s1)


def _is_line(name: str) -> bool:
    try:
        return get_triple(name).line
    except Exception:
        return False


def trace_statistic(m: DistanceMinor) -> TraceStat:
    """``T_n = (sum_{i,j} M_ij^2) / (2 n^3)``.

    For line triples whose minor carries its points, the power sums of the
    sample are recorded alongside.
    """
    n = m.n
    value = frobenius_sq(m) / (2.0 * n**3)
    if m.points is not None and _is_line(m.triple_name):
        x = m.points.ravel()
        return TraceStat(n, value, float(np.dot(x, x)), float(np.sum(x)))
    return TraceStat(n, value)


def squared_distance_kernel(triple: MetricTriple) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    def kernel(p, q):
        d = np.array([triple.cross(p[i : i + 1], q[i : i + 1])[0, 0] for i in range(len(p))])
        return d * d

    return kernel


def u_statistic(kernel: Callable, pts, gamma: float) -> float:
    """``n^(-gamma) sum_{i<j} kernel(x_i, x_j)``.

    ``kernel(p, q)`` receives two equally long arrays of points (row ``k`` of
    ``p`` pairs with row ``k`` of ``q``) and returns one value per pair, or a
    scalar for a constant kernel.
    """
    arr = np.asarray(pts, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    n = arr.shape[0]
    if n < 2:
        raise InvalidInputError("a U-statistic needs at least 2 points")
    i, j = np.triu_indices(n, 1)
    vals = np.broadcast_to(np.asarray(kernel(arr[i], arr[j]), dtype=float), i.shape)
    return float(math.fsum(vals)) / float(n) ** gamma


# -- the Levy law -----------------------------------------------------------


def levy_cdf(x, scale: float = 1.0) -> np.ndarray:
    """CDF of ``scale * L`` with ``L`` standard Levy: ``erfc(sqrt(scale / (2x)))``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = erfc(np.sqrt(scale / (2.0 * np.where(x > 0, x, 1.0))))
    return np.where(x > 0, out, 0.0)


def sample_levy_limit(count: int, stream: np.random.Generator) -> np.ndarray:
    count = int(count)
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    z = stream.standard_normal(count)
    while np.any(z == 0.0):
        z[z == 0.0] = stream.standard_normal(int(np.count_nonzero(z == 0.0)))
    return 1.0 / (z * z)


@dataclass(frozen=True)
class StableLimit:
    alpha: float
    scale: float

    def cdf(self, x) -> np.ndarray:
        return levy_cdf(x, self.scale)


def calibrate_scale(samples: Sequence[float]) -> StableLimit:
    """Median matching: ``c* = median(samples) / median(standard Levy)``."""
    s = np.asarray(samples, dtype=float).ravel()
    if s.size < MIN_CALIBRATION:
        raise InsufficientDataError(
            f"scale calibration needs at least {MIN_CALIBRATION} samples, got {s.size}"
        )
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise InvalidInputError("calibration samples must be finite and nonnegative")
    if np.all(s == s[0]):
        raise NumericDegeneracyError("all calibration samples are equal")
    med = quantile(s, 0.5)
    if med <= 0:
        raise NumericDegeneracyError("sample median is zero")
    return StableLimit(0.5, med / LEVY_MEDIAN)


@dataclass
class LevyFit:
    alpha: float
    scale: float
    ks_distance: float
    n: int
    reps: int
    calibration_reps: int

    def as_dict(self) -> dict:
        return asdict(self)


def fit_levy(test: Sequence[float], calibration: Sequence[float], n: int) -> LevyFit:
    """Calibrate on one batch, then measure KS of ``test / c*`` to the standard law."""
    lim = calibrate_scale(calibration)
    t = np.asarray(test, dtype=float)
    if t.size < MIN_CALIBRATION:
        raise InsufficientDataError(f"need at least {MIN_CALIBRATION} test samples, got {t.size}")
    ks = ks_distance(t / lim.scale, levy_cdf)
    return LevyFit(lim.alpha, lim.scale, ks, int(n), int(t.size), int(np.size(calibration)))


# -- Cauchy tail ------------------------------------------------------------

TAIL_LEVELS = (1e2, 1e3, 1e4)


def cauchy_square_survival(t) -> np.ndarray:
    """``P(x^2 > t)`` for standard Cauchy ``x``."""
    return 1.0 - (2.0 / math.pi) * np.arctan(np.sqrt(np.asarray(t, dtype=float)))


@dataclass
class TailReport:
    estimate: float
    analytic: float
    two_sided_constant: float  # 2/pi, limit of sqrt(t) P(|x| > sqrt t)
    one_sided_constant: float  # 1/pi, limit of sqrt(t) P(x > sqrt t)
    levels: tuple
    count: int


def tail_exponent_check(
    triple: MetricTriple, count: int, stream: np.random.Generator, levels=TAIL_LEVELS
) -> TailReport:
    """Estimate ``c`` in ``P(x^2 > t) ~ c / sqrt(t)`` by averaging ``sqrt(t) * survival``."""
    if triple.name != "cauchy-line":
        raise UnsupportedTripleError("the tail check is defined for the Cauchy line only")
    if int(count) < 10_000:
        raise InvalidInputError("count must be >= 10^4")
    y = sample_points(triple, int(count), stream).ravel() ** 2
    levels = tuple(float(t) for t in levels)
    est = np.mean([math.sqrt(t) * np.mean(y > t) for t in levels])
    ana = np.mean([math.sqrt(t) * float(cauchy_square_survival(t)) for t in levels])
    return TailReport(float(est), float(ana), 2.0 / math.pi, 1.0 / math.pi, levels, int(count))


# -- replication drivers ----------------------------------------------------


@dataclass
class TraceReplications:
    n: int
    values: np.ndarray
    sums: np.ndarray | None
    sum_sqs: np.ndarray | None
    seeds: list

    def __len__(self) -> int:
        return len(self.values)


def trace_replications(
    triple: MetricTriple,
    n: int,
    reps: int,
    streams: Callable[[int], np.random.Generator],
    labels: Callable[[int], str] | None = None,
) -> TraceReplications:
    """``T_n`` for replications ``0..reps-1``, each from its own stream.

    Line triples use the O(n) power-sum form; other triples assemble the minor.
    """
    n, reps = int(n), int(reps)
    if n < 1 or reps < 1:
        raise InvalidInputError("need n >= 1 and reps >= 1")
    vals = np.empty(reps)
    sums = np.empty(reps) if triple.line else None
    sqs = np.empty(reps) if triple.line else None
    for r in range(reps):
        g = streams(r)
        if triple.line:
            ts = trace_value_from_line(sample_points(triple, n, g))
            sums[r], sqs[r] = ts.sum, ts.sum_sq
        else:
            ts = trace_statistic(sample_minor(triple, n, g))
        vals[r] = ts.value
    seeds = [labels(r) if labels else str(r) for r in range(reps)]
    return TraceReplications(n, vals, sums, sqs, seeds)
