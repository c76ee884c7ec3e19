"""Empirical spectral measures of distance minors.

A :class:`SpectralMeasure` keeps the raw eigenvalues together with the
accumulated normalizer ``scale``; the visible atoms are ``raw / scale``.
Rescaling by ``a_n`` pushes the measure forward under ``x -> x / a_n``, so
with ``a_n = n`` the atoms approximate the integral operator's eigenvalues.
Storing the raw values means composed rescalings agree exactly with a single
rescale by the product of the factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, NumericDegeneracyError
from .matdist import DistanceMinor, sample_minor
from .triples import MetricTriple

# LAPACK dsyev: Householder tridiagonalization followed by implicit QL/QR
EIGEN_DRIVER = "ev"


@dataclass(frozen=True)
class SpectralMeasure:
    raw: np.ndarray = field(repr=False)
    scale: float = 1.0
    triple_name: str = ""
    seed: str | None = None

    @property
    def n(self) -> int:
        return len(self.raw)

    @property
    def atoms(self) -> np.ndarray:
        if self.scale == 1.0:
            return self.raw
        return self.raw / self.scale

    @classmethod
    def from_atoms(cls, atoms, **kw) -> "SpectralMeasure":
        return cls(np.sort(np.asarray(atoms, dtype=float)), 1.0, **kw)


def symmetric_eigh(a: np.ndarray, vectors: bool = False):
    """Eigen-decomposition of a real symmetric matrix via the symmetric QL/QR driver."""
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    if a.shape == (1, 1):
        w = a[0].copy()
        return (w, np.ones((1, 1))) if vectors else w
    return scipy.linalg.eigh(
        a, eigvals_only=not vectors, driver=EIGEN_DRIVER, check_finite=False
    )


def residual_norms(a: np.ndarray, w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``||A v_i - w_i v_i||_2`` for each eigenpair."""
    return np.linalg.norm(a @ v - v * w, axis=0)


def eigenvalues_symmetric(m: DistanceMinor | np.ndarray, check_residuals: bool = False) -> SpectralMeasure:
    """All eigenvalues of a minor, sorted ascending, as a raw spectral measure.

    With ``check_residuals`` the eigenvectors are computed too and every pair
    must satisfy ``||Mv - lambda v|| <= 1e-8 (1 + ||M||_F)``.
    """
    if isinstance(m, DistanceMinor):
        a, name, seed = m.entries, m.triple_name, m.seed
    else:
        a, name, seed = np.asarray(m, dtype=float), "", None
    if check_residuals:
        w, v = symmetric_eigh(a, vectors=True)
        bound = 1e-8 * (1.0 + np.linalg.norm(a))
        worst = residual_norms(a, w, v).max()
        if worst > bound:
            raise NumericDegeneracyError(f"eigen residual {worst:.3e} exceeds {bound:.3e}")
    else:
        w = symmetric_eigh(a)
    return SpectralMeasure(np.sort(w), 1.0, name, seed)


def rescale(sm: SpectralMeasure, a_n: float) -> SpectralMeasure:
    a_n = float(a_n)
    if not a_n > 0 or not math.isfinite(a_n):
        raise InvalidInputError(f"normalizer must be positive and finite, got {a_n}")
    return SpectralMeasure(sm.raw, sm.scale * a_n, sm.triple_name, sm.seed)


# -- test functions ---------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """Compactly supported test profile on ``[a, b]`` with ``0`` outside the support.

    ``hat`` rises linearly from ``a`` to ``height`` at ``peak`` and falls to
    ``b``.  ``bump`` is the raised cosine ``height * cos^2``, continuously
    differentiable, centred on the interval.
    """

    __test__ = False  # keep pytest from collecting this class

    kind: str
    a: float
    b: float
    height: float = 1.0
    peak: float | None = None

    def __post_init__(self):
        if self.kind not in ("hat", "bump"):
            raise InvalidInputError(f"unknown test-function kind {self.kind!r}")
        if not self.a < self.b:
            raise InvalidInputError("support must satisfy a < b")
        if self.a <= 0.0 <= self.b:
            raise InvalidInputError("support must not contain 0")
        if self.peak is not None and not self.a < self.peak < self.b:
            raise InvalidInputError("peak must lie strictly inside the support")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        a, b = self.a, self.b
        inside = (x > a) & (x < b)
        if self.kind == "hat":
            c = 0.5 * (a + b) if self.peak is None else self.peak
            up = (x - a) / (c - a)
            down = (b - x) / (b - c)
            val = np.where(x <= c, up, down)
        else:
            val = np.cos(math.pi * (x - 0.5 * (a + b)) / (b - a)) ** 2
        return np.where(inside, self.height * val, 0.0)


def hat(a: float, b: float, peak: float | None = None, height: float = 1.0) -> TestFunction:
    return TestFunction("hat", a, b, height, peak)


def bump(a: float, b: float, height: float = 1.0) -> TestFunction:
    return TestFunction("bump", a, b, height)


def apply_functional(sm: SpectralMeasure, f) -> float:
    """``sum_i f(atom_i)``: the integral of ``f`` against the counting measure."""
    return float(np.sum(f(sm.atoms)))


def power_sum(sm: SpectralMeasure, k: int) -> float:
    k = int(k)
    if k < 1:
        raise InvalidInputError("power must be >= 1")
    return float(np.sum(sm.atoms**k))


def atoms_near_zero(sm: SpectralMeasure, eps: float) -> int:
    """Number of atoms with ``|x| < eps`` (mass a test function cannot see)."""
    return int(np.count_nonzero(np.abs(sm.atoms) < eps))


# -- normalization ----------------------------------------------------------


def frobenius_sq(m: DistanceMinor) -> float:
    """``tr M^2``, i.e. the sum of squared entries."""
    e = m.entries
    return float(np.einsum("ij,ij->", e, e))


@dataclass
class GrowthFit:
    beta: float
    orders: list[int]
    medians: list[float]
    reps: int

    @property
    def eigen_exponent(self) -> float:
        """Exponent for ``a_n = n^gamma`` on eigenvalues: half of the ``tr M^2`` exponent."""
        return self.beta / 2.0


def estimate_growth_exponent(
    triple: MetricTriple,
    orders: Sequence[int],
    reps: int,
    stream: np.random.Generator | None = None,
    streams=None,
) -> GrowthFit:
    """Fit ``log median(tr M_n^2)`` against ``log n`` by least squares.

    Either one ``stream`` is consumed for all draws, or ``streams(r, n)``
    supplies the generator for replication ``r`` at order ``n``.
    """
    orders = [int(n) for n in orders]
    if len(set(orders)) < 3 or any(n < 16 for n in orders) or orders != sorted(orders):
        raise InvalidInputError("need at least 3 distinct increasing orders, each >= 16")
    if int(reps) < 3:
        raise InvalidInputError("need at least 3 replications")
    if stream is None and streams is None:
        raise InvalidInputError("supply a stream or a stream factory")
    medians = []
    for n in orders:
        vals = []
        for r in range(int(reps)):
            g = stream if streams is None else streams(r, n)
            vals.append(frobenius_sq(sample_minor(triple, n, g)))
        medians.append(float(np.median(vals)))
    med = np.asarray(medians)
    if np.any(med <= 0) or not np.all(np.isfinite(med)):
        raise NumericDegeneracyError("trace medians are zero or non-finite; cannot fit a power law")
    beta = float(np.polyfit(np.log(orders), np.log(med), 1)[0])
    return GrowthFit(beta, orders, medians, int(reps))


def normalizer(n: int, mode: str = "raw", beta: float | None = None) -> float:
    """The scale ``a_n`` for a normalization mode: ``raw``, ``n`` or ``power``."""
    if mode == "raw":
        return 1.0
    if mode == "n":
        return float(n)
    if mode == "power":
        if beta is None:
            raise InvalidInputError("power normalization needs beta")
        return float(n) ** float(beta)
    raise InvalidInputError(f"unknown normalization {mode!r}")
