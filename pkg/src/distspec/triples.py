"""Metric triples: a sampleable probability measure together with a metric.

Points are plain float arrays.  A single point has shape ``(dim,)`` and a
sample of ``n`` points has shape ``(n, dim)``, where ``dim`` is the number of
coordinates the triple uses (1 for the line, the interval and the circle
angle; ``d + 1`` ambient coordinates for the sphere ``S^d``).  The triple
owns the metric, so the same sample can be re-measured under another metric.

Distances are computed coordinate by coordinate with the same arithmetic for
single pairs and for whole matrices.  This keeps ``distance(p, q)`` bitwise
equal to ``distance(q, p)`` and to the corresponding entry of a pairwise
matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidInputError

TWO_PI = 2.0 * math.pi

Sampler = Callable[[np.random.Generator, int], np.ndarray]
Pairwise = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MetricTriple:
    """An immutable ``(X, mu, rho)`` description.

    ``sampler(stream, n)`` returns ``n`` i.i.d. points as an ``(n, dim)``
    array.  ``cross(a, b)`` returns the ``len(a) x len(b)`` matrix of
    distances between two point arrays and is the single source of metric
    arithmetic.  ``hs_norm_sq`` is the double integral of the squared metric
    when it is known in closed form (``None`` otherwise).
    """

    name: str
    dimension: int
    sampler: Sampler = field(repr=False)
    cross: Pairwise = field(repr=False)
    square_integrable: bool
    hs_norm_sq: float | None = None
    line: bool = False  # points are reals and rho(x, y) = |x - y|
    params: dict = field(default_factory=dict)

    def metric(self, p, q) -> float:
        return distance(self, p, q)


def _as_points(triple: MetricTriple, pts) -> np.ndarray:
    arr = np.asarray(pts, dtype=float)
    if arr.ndim == 0 or (arr.ndim == 1 and triple.dimension == 1):
        arr = arr.reshape(-1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != triple.dimension:
        raise InvalidInputError(
            f"{triple.name} points have {triple.dimension} coordinate(s), "
            f"got array of shape {np.shape(pts)}"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("point coordinates must be finite")
    return arr


def as_points(triple: MetricTriple, pts) -> np.ndarray:
    """Validate ``pts`` and return them as an ``(n, dim)`` float array."""
    return _as_points(triple, pts)


# -- metric kernels ---------------------------------------------------------


def _abs_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs(a[:, 0][:, None] - b[:, 0][None, :])


def _circle_geodesic(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.abs(a[:, 0][:, None] - b[:, 0][None, :])
    return np.minimum(d, TWO_PI - d)


def _chordal(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # sequential accumulation over coordinates keeps the result symmetric
    acc = np.zeros((a.shape[0], b.shape[0]))
    for k in range(a.shape[1]):
        diff = a[:, k][:, None] - b[:, k][None, :]
        acc += diff * diff
    return np.sqrt(acc)


# -- samplers ---------------------------------------------------------------


def _cauchy_sampler(stream: np.random.Generator, n: int) -> np.ndarray:
    u = stream.random(n)
    return np.tan(math.pi * (u - 0.5)).reshape(n, 1)


def _uniform_sampler(stream: np.random.Generator, n: int) -> np.ndarray:
    return stream.random(n).reshape(n, 1)


def _angle_sampler(stream: np.random.Generator, n: int) -> np.ndarray:
    return (TWO_PI * stream.random(n)).reshape(n, 1)


def _sphere_sampler(d: int) -> Sampler:
    def sample(stream: np.random.Generator, n: int) -> np.ndarray:
        g = stream.standard_normal((n, d + 1))
        return g / np.linalg.norm(g, axis=1, keepdims=True)

    return sample


# -- built-in constructors --------------------------------------------------


def cauchy_line() -> MetricTriple:
    """Real line, Euclidean metric, standard Cauchy measure."""
    return MetricTriple(
        name="cauchy-line",
        dimension=1,
        sampler=_cauchy_sampler,
        cross=_abs_diff,
        square_integrable=False,
        line=True,
    )


def unit_interval() -> MetricTriple:
    return MetricTriple(
        name="unit-interval",
        dimension=1,
        sampler=_uniform_sampler,
        cross=_abs_diff,
        square_integrable=True,
        hs_norm_sq=1.0 / 6.0,
        line=True,
    )


def circle_geodesic() -> MetricTriple:
    """Circle of circumference 2*pi with arc-length metric and uniform measure."""
    return MetricTriple(
        name="circle",
        dimension=1,
        sampler=_angle_sampler,
        cross=_circle_geodesic,
        square_integrable=True,
        hs_norm_sq=math.pi**2 / 3.0,
    )


def sphere_chordal(d: int) -> MetricTriple:
    """Unit sphere ``S^d`` in ``R^(d+1)`` with chordal distance and uniform measure.

    The mean squared chordal distance is 2 in every dimension, since
    ``|p - q|^2 = 2 - 2<p, q>`` and ``<p, q>`` has mean zero.
    """
    d = int(d)
    if d < 1:
        raise InvalidInputError(f"sphere dimension must be >= 1, got {d}")
    return MetricTriple(
        name=f"sphere:{d}",
        dimension=d + 1,
        sampler=_sphere_sampler(d),
        cross=_chordal,
        square_integrable=True,
        hs_norm_sq=2.0,
        params={"d": d},
    )


REGISTRY: dict[str, Callable[..., MetricTriple]] = {
    "cauchy-line": cauchy_line,
    "unit-interval": unit_interval,
    "circle": circle_geodesic,
    "sphere": sphere_chordal,
}


def registry_names() -> list[str]:
    return ["cauchy-line", "unit-interval", "circle", "sphere:d"]


def get_triple(name: str) -> MetricTriple:
    """Look up a built-in triple by name, e.g. ``"circle"`` or ``"sphere:2"``."""
    key, _, arg = name.partition(":")
    if key == "sphere":
        try:
            return sphere_chordal(int(arg))
        except ValueError:
            pass
    elif key in REGISTRY and not arg:
        return REGISTRY[key]()
    raise InvalidInputError(
        f"unknown triple {name!r}; known triples: {', '.join(registry_names())}"
    )


# -- operations -------------------------------------------------------------


def sample_points(triple: MetricTriple, n: int, stream: np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. points from the triple's measure."""
    if int(n) < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    return triple.sampler(stream, int(n))


def distance(triple: MetricTriple, p, q) -> float:
    a = _as_points(triple, p)
    b = _as_points(triple, q)
    if a.shape[0] != 1 or b.shape[0] != 1:
        raise InvalidInputError("distance expects single points")
    return float(triple.cross(a, b)[0, 0])


def pairwise(triple: MetricTriple, pts) -> np.ndarray:
    """Full distance matrix of a point sample."""
    a = _as_points(triple, pts)
    return triple.cross(a, a)


@dataclass
class AxiomReport:
    trials: int
    symmetry_violations: int
    zero_diagonal_violations: int
    triangle_violations: int
    worst_slack: float

    @property
    def violations(self) -> int:
        return self.symmetry_violations + self.zero_diagonal_violations + self.triangle_violations

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.worst_slack <= 1e-9


def check_metric_axioms(
    triple: MetricTriple, trials: int, stream: np.random.Generator, tol: float = 1e-9
) -> AxiomReport:
    """Check symmetry, zero diagonal and the triangle inequality on random triples.

    ``worst_slack`` is the largest ``rho(p, r) - rho(p, q) - rho(q, r)`` seen.
    """
    if int(trials) < 1:
        raise InvalidInputError("trials must be >= 1")
    trials = int(trials)
    p = sample_points(triple, trials, stream)
    q = sample_points(triple, trials, stream)
    r = sample_points(triple, trials, stream)

    def rowwise(a, b):
        return np.array([triple.cross(a[i : i + 1], b[i : i + 1])[0, 0] for i in range(len(a))])

    pq, qp = rowwise(p, q), rowwise(q, p)
    qr, pr = rowwise(q, r), rowwise(p, r)
    pp = rowwise(p, p)
    slack = pr - pq - qr
    return AxiomReport(
        trials=trials,
        symmetry_violations=int(np.count_nonzero(pq != qp)),
        zero_diagonal_violations=int(np.count_nonzero(pp != 0.0)),
        triangle_violations=int(np.count_nonzero(slack > tol)),
        worst_slack=float(slack.max()),
    )
