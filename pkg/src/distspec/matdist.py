"""Finite minors of the random distance matrix of a metric triple."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .triples import MetricTriple, as_points, sample_points


@dataclass(frozen=True)
class DistanceMinor:
    """One draw of the order-``n`` upper minor ``(rho(x_i, x_j))``.

    ``points`` keeps the sample the matrix was built from, when known, so
    statistics with a closed form in the points can use it.
    """

    entries: np.ndarray = field(repr=False)
    triple_name: str
    seed: str | None = None
    points: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        e = self.entries
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] < 1:
            raise InvalidInputError(f"minor must be a non-empty square array, got {e.shape}")
        e.setflags(write=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def upper(self, k: int) -> "DistanceMinor":
        """Nested upper minor of order ``k`` (for coupled-growth studies)."""
        if not 1 <= k <= self.n:
            raise InvalidInputError(f"order {k} outside 1..{self.n}")
        pts = None if self.points is None else self.points[:k]
        return DistanceMinor(self.entries[:k, :k].copy(), self.triple_name, self.seed, pts)


def validate_minor(m: DistanceMinor) -> None:
    """Raise if ``m`` is not a symmetric, hollow, finite, nonnegative matrix."""
    e = m.entries
    if not np.all(np.isfinite(e)):
        raise InvalidInputError("minor has non-finite entries")
    if np.any(e < 0):
        raise InvalidInputError("minor has negative entries")
    if np.any(np.diag(e) != 0):
        raise InvalidInputError("minor diagonal is not zero")
    if not np.array_equal(e, e.T):
        raise InvalidInputError("minor is not symmetric")


def minor_from_points(triple: MetricTriple, pts, seed: str | None = None) -> DistanceMinor:
    arr = as_points(triple, pts)
    return DistanceMinor(triple.cross(arr, arr), triple.name, seed, arr)


def sample_minor(
    triple: MetricTriple, n: int, stream: np.random.Generator, seed: str | None = None
) -> DistanceMinor:
    """Draw ``n`` i.i.d. points and assemble their distance matrix.

    Only the sampler consumes randomness.
    """
    if int(n) < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    return minor_from_points(triple, sample_points(triple, n, stream), seed)


def _check_permutation(sigma, n: int) -> np.ndarray:
    s = np.asarray(sigma)
    if s.shape != (n,) or not np.issubdtype(s.dtype, np.integer):
        raise InvalidInputError(f"permutation must be {n} integers")
    if not np.array_equal(np.sort(s), np.arange(n)):
        raise InvalidInputError("sigma is not a permutation of 0..n-1")
    return s


def permute_minor(m: DistanceMinor, sigma) -> DistanceMinor:
    """Simultaneously permute rows and columns: ``out[i, j] = m[sigma[i], sigma[j]]``.

    ``sigma`` is zero-based.
    """
    s = _check_permutation(sigma, m.n)
    pts = None if m.points is None else m.points[s]
    return DistanceMinor(m.entries[np.ix_(s, s)], m.triple_name, m.seed, pts)


def inverse_permutation(sigma) -> np.ndarray:
    s = np.asarray(sigma)
    inv = np.empty_like(s)
    inv[s] = np.arange(len(s))
    return inv
