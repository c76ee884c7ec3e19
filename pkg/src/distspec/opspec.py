"""Spectrum of the integral operator whose kernel is the metric.

For a square-integrable metric the operator ``(I f)(y) = int rho(x, y) f(x) dmu(x)``
is Hilbert-Schmidt on ``L^2(mu)``.  Its spectrum is approximated here by the
Nystrom method on equal-weight nodes, and for the circle it is also known in
closed form from the Fourier coefficients of the geodesic distance.

Spectra are ordered by decreasing absolute value (positive first on ties),
and empirical spectra are matched to operator spectra rank by rank in that
ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .eig import eigenvalues_symmetric, rescale, symmetric_eigh
from .errors import InvalidInputError, UnsupportedTripleError
from .matdist import sample_minor
from .triples import TWO_PI, MetricTriple

ORDERING = "descending |lambda|, positive first on ties"

# seed for the Monte Carlo nodes used where no deterministic rule exists
NODE_SEED = 0x5EED


@dataclass(frozen=True)
class OperatorSpectrum:
    eigenvalues: np.ndarray = field(repr=False)
    method: str
    resolution: int
    approximate: bool = False
    triple_name: str = ""

    def top(self, k: int) -> np.ndarray:
        return self.eigenvalues[:k]


def by_abs_desc(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return v[np.lexsort((-v, -np.abs(v)))]


def quadrature_nodes(triple: MetricTriple, grid: int) -> tuple[np.ndarray, np.ndarray, bool]:
    """Nodes, weights and an ``approximate`` flag for an equal-weight rule.

    Unit interval: midpoints.  Circle and ``S^1``: equispaced angles.  Other
    spheres and anything else: ``grid`` Monte Carlo points from the triple's
    own sampler under a fixed seed, flagged approximate.
    """
    w = np.full(grid, 1.0 / grid)
    if triple.name == "unit-interval":
        return ((np.arange(grid) + 0.5) / grid).reshape(-1, 1), w, False
    theta = TWO_PI * np.arange(grid) / grid
    if triple.name == "circle":
        return theta.reshape(-1, 1), w, False
    if triple.name == "sphere:1":
        return np.column_stack([np.cos(theta), np.sin(theta)]), w, False
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([NODE_SEED, grid])))
    return triple.sampler(rng, grid), w, True


def _require_square_integrable(triple: MetricTriple) -> None:
    if not triple.square_integrable:
        raise UnsupportedTripleError(
            f"{triple.name}: metric is not square integrable; "
            "the integral operator is not Hilbert-Schmidt and is not discretized"
        )


def nystrom_spectrum(triple: MetricTriple, grid: int) -> OperatorSpectrum:
    """Eigenvalues of ``W^(1/2) R W^(1/2)`` with ``R`` the node distance matrix."""
    _require_square_integrable(triple)
    grid = int(grid)
    if grid < 2:
        raise InvalidInputError(f"grid must be >= 2, got {grid}")
    nodes, w, approx = quadrature_nodes(triple, grid)
    sw = np.sqrt(w)
    k = sw[:, None] * triple.cross(nodes, nodes) * sw[None, :]
    return OperatorSpectrum(by_abs_desc(symmetric_eigh(k)), "nystrom", grid, approx, triple.name)


def circle_fourier_coefficient(k: int) -> float:
    """``(1/2pi) int_0^{2pi} min(t, 2pi - t) e^{-ikt} dt``."""
    k = abs(int(k))
    if k == 0:
        return math.pi / 2.0
    return ((-1) ** k - 1) / (math.pi * k * k)


def analytic_circle_spectrum(k_max: int) -> OperatorSpectrum:
    """Exact circle spectrum truncated at frequency ``k_max``; ``k >= 1`` appear twice."""
    k_max = int(k_max)
    if k_max < 1:
        raise InvalidInputError("k_max must be >= 1")
    vals = [circle_fourier_coefficient(0)]
    for k in range(1, k_max + 1):
        c = circle_fourier_coefficient(k)
        vals += [c, c]
    return OperatorSpectrum(by_abs_desc(vals), "analytic", k_max, False, "circle")


def operator_reference(triple: MetricTriple, grid: int = 512, k_max: int = 64) -> OperatorSpectrum:
    """The best available operator spectrum: analytic for the circle, Nystrom otherwise."""
    _require_square_integrable(triple)
    if triple.name == "circle":
        return analytic_circle_spectrum(k_max)
    return nystrom_spectrum(triple, max(int(grid), 512))


@dataclass
class ComparisonReport:
    triple_name: str
    n: int
    reps: int
    top: int
    operator: OperatorSpectrum
    empirical: np.ndarray = field(repr=False)  # reps x top, scaled by 1/n, ordered

    @property
    def operator_top(self) -> np.ndarray:
        vals = self.operator.top(self.top)
        if len(vals) < self.top:
            vals = np.concatenate([vals, np.zeros(self.top - len(vals))])
        return vals

    @property
    def deviations(self) -> np.ndarray:
        """``|empirical - operator|`` per replication and rank."""
        return np.abs(self.empirical - self.operator_top[None, :])

    @property
    def mean_abs_deviation(self) -> np.ndarray:
        return self.deviations.mean(axis=0)

    def as_dict(self) -> dict:
        return {
            "triple": self.triple_name,
            "n": self.n,
            "reps": self.reps,
            "top": self.top,
            "normalizer": "a_n = n",
            "ordering": ORDERING,
            "operator_method": self.operator.method,
            "operator_resolution": self.operator.resolution,
            "monte_carlo_caveat": bool(self.operator.approximate),
            "operator_top": [float(x) for x in self.operator_top],
            "empirical_mean_top": [float(x) for x in self.empirical.mean(axis=0)],
            "mean_abs_deviation": [float(x) for x in self.mean_abs_deviation],
        }


def _stream(stream, r: int) -> np.random.Generator:
    return stream(r) if callable(stream) else stream


def compare_empirical_to_operator(
    triple: MetricTriple,
    n: int,
    reps: int,
    top: int,
    stream: np.random.Generator | Callable[[int], np.random.Generator],
    grid: int = 512,
    k_max: int = 64,
) -> ComparisonReport:
    """Match the ``top`` largest-magnitude eigenvalues of ``M_n / n`` to the operator's.

    ``stream`` is one generator shared by all replications or a function
    returning the generator for replication ``r``.
    """
    _require_square_integrable(triple)
    n, reps, top = int(n), int(reps), int(top)
    if n < 1 or reps < 1 or not 1 <= top <= n:
        raise InvalidInputError("need n >= 1, reps >= 1 and 1 <= top <= n")
    op = operator_reference(triple, grid, k_max)
    emp = np.empty((reps, top))
    for r in range(reps):
        sm = rescale(eigenvalues_symmetric(sample_minor(triple, n, _stream(stream, r))), n)
        emp[r] = by_abs_desc(sm.atoms)[:top]
    return ComparisonReport(triple.name, n, reps, top, op, emp)
