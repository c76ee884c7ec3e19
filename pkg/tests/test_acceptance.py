"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line with the measured value and tolerance;
the lines are printed in the pytest terminal summary.  Stochastic criteria
use the suite seed and the replication streams of :mod:`distspec.rng`.
"""

import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, SEED
from distspec.cli import main
from distspec.eig import eigenvalues_symmetric, estimate_growth_exponent, frobenius_sq
from distspec.heavytail import fit_levy, trace_replications, trace_value_from_line
from distspec.inference import iqr
from distspec.matdist import permute_minor, sample_minor
from distspec.opspec import analytic_circle_spectrum, compare_empirical_to_operator, nystrom_spectrum
from distspec.rng import replication_stream
from distspec.triples import cauchy_line, circle_geodesic, sample_points, unit_interval


def record(num, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {num}. {title}: {detail}")
    return ok


def streams(batch=None):
    return lambda r: replication_stream(SEED, r, batch)


def test_1_power_sum_identity():
    g = replication_stream(SEED, 0)
    worst = 0.0
    for n in (3, 10, 100):
        for _ in range(100):
            x = sample_points(cauchy_line(), n, g).ravel()
            ts = trace_value_from_line(x)
            lhs = n * ts.sum_sq - ts.sum**2
            rhs = math.fsum(((x[:, None] - x[None, :])[np.triu_indices(n, 1)] ** 2).tolist())
            worst = max(worst, abs(lhs - rhs) / rhs)
    assert record(1, "n sum x^2 - (sum x)^2 = sum_{i<j} (x_i - x_j)^2", worst <= 1e-9,
                  f"worst rel err {worst:.2e} (tol 1e-9)")


def test_2_exchangeability():
    g = replication_stream(SEED, 0)
    worst = 0.0
    for _ in range(50):
        m = sample_minor(unit_interval(), 200, g)
        pm = permute_minor(m, g.permutation(200))
        dev = np.max(np.abs(eigenvalues_symmetric(pm).atoms - eigenvalues_symmetric(m).atoms))
        worst = max(worst, dev / (1.0 + np.linalg.norm(m.entries)))
    assert record(2, "spectrum invariant under simultaneous permutation", worst <= 1e-6,
                  f"worst dev / (1 + |M|_F) {worst:.2e} (tol 1e-6)")


def test_3_square_integrable_determinism():
    rep = compare_empirical_to_operator(circle_geodesic(), 1000, 20, 3, streams())
    top_dev = float(rep.mean_abs_deviation[0])
    neg_dev = float(np.max(np.abs(rep.empirical[:, 1:] + 2 / math.pi).mean(axis=0)))
    ok = top_dev <= 0.05 and neg_dev <= 0.05
    assert record(3, "circle spectrum / n -> Fourier coefficients", ok,
                  f"|lambda_max - pi/2| {top_dev:.4f}, |lambda_neg + 2/pi| {neg_dev:.4f} (tol 0.05)")


def test_4_hilbert_schmidt_consistency():
    n = 1000
    vals = [frobenius_sq(sample_minor(unit_interval(), n, streams()(r))) / n**2 for r in range(20)]
    emp_dev = abs(float(np.mean(vals)) - 1 / 6)
    hs = float(np.sum(nystrom_spectrum(unit_interval(), 512).eigenvalues ** 2))
    ny_dev = abs(hs - 1 / 6)
    ok = emp_dev <= 0.01 and ny_dev <= 0.01
    assert record(4, "n^-2 tr M^2 and Nystrom sum lambda^2 -> 1/6", ok,
                  f"empirical dev {emp_dev:.2e}, Nystrom dev {ny_dev:.2e} (tol 0.01)")


def test_5_levy_limit():
    n, reps = 5000, 400
    test = trace_replications(cauchy_line(), n, reps, streams())
    calib = trace_replications(cauchy_line(), n, reps, streams(1))
    fit = fit_levy(test.values, calib.values, n)
    assert record(5, "T_n / c* vs erfc(1/sqrt(2x)), n=5000", fit.ks_distance <= 0.08,
                  f"KS {fit.ks_distance:.4f}, c* {fit.scale:.4f} (tol 0.08)")


def test_6_nondeterminacy_contrast():
    def spread(triple, n, stat):
        return iqr(stat(trace_replications(triple, n, 200, streams()).values, n))

    t_n = lambda v, n: v
    hs = lambda v, n: 2.0 * n * v  # n^-2 tr M^2
    cauchy = spread(cauchy_line(), 4000, t_n) / spread(cauchy_line(), 500, t_n)
    unit = spread(unit_interval(), 500, hs) / spread(unit_interval(), 4000, hs)
    ok = 1 / 1.6 <= cauchy <= 1.6 and unit >= 2
    assert record(6, "IQR: Cauchy T_n stable, unit-interval n^-2 tr M^2 shrinks", ok,
                  f"Cauchy IQR(4000)/IQR(500) {cauchy:.3f} (within x1.6), "
                  f"unit IQR(500)/IQR(4000) {unit:.3f} (>= 2)")


def test_7_normalization_exponents():
    orders = (128, 256, 512, 1024)
    by_rep = lambda r, n: replication_stream(SEED, r)
    bc = estimate_growth_exponent(cauchy_line(), orders, 50, streams=by_rep).beta
    bu = estimate_growth_exponent(unit_interval(), orders, 20, streams=by_rep).beta
    ok = 2.7 <= bc <= 3.3 and 1.9 <= bu <= 2.1
    assert record(7, "growth exponent of tr M^2", ok,
                  f"Cauchy {bc:.3f} in [2.7, 3.3], unit {bu:.3f} in [1.9, 2.1]")


def _charpoly_roots(a):
    n = a.shape[0]
    coeffs = [1.0]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    roots = np.roots(coeffs).real
    p, dp = np.poly1d(coeffs), np.poly1d(coeffs).deriv()
    for _ in range(3):
        d = dp(roots)
        roots = roots - np.where(np.abs(d) > 1e-8, p(roots) / np.where(d == 0, 1.0, d), 0.0)
    return np.sort(roots)


def test_8_eigensolver_oracles():
    g = replication_stream(SEED, 0)
    worst = 0.0
    for _ in range(100):
        b = g.uniform(-1, 1, (5, 5))
        a = (b + b.T) / 2
        worst = max(worst, float(np.max(np.abs(eigenvalues_symmetric(a).atoms - _charpoly_roots(a)))))
    ny = nystrom_spectrum(circle_geodesic(), 512).top(5)
    an = analytic_circle_spectrum(64).top(5)
    ny_dev = float(np.max(np.abs(ny - an)))
    ok = worst <= 1e-6 and ny_dev <= 1e-3
    assert record(8, "eigensolver vs char. polynomial; Nystrom vs Fourier", ok,
                  f"charpoly dev {worst:.2e} (tol 1e-6), Nystrom top-5 dev {ny_dev:.2e} (tol 1e-3)")


COMMANDS = [
    ["sample", "--triple", "sphere:2", "--n", "8", "--reps", "2"],
    ["spectrum", "--triple", "circle", "--n", "60", "--reps", "2", "--norm", "n"],
    ["trace-dist", "--triple", "cauchy-line", "--n", "300", "--reps", "100"],
    ["operator", "--triple", "circle", "--grid", "128", "--kmax", "16", "--n", "50", "--reps", "2"],
    ["growth", "--triple", "unit-interval", "--orders", "16,32,64", "--reps", "3"],
    ["check", "--reps", "100"],
]


def test_9_determinism(tmp_path):
    mismatched, count = [], 0
    for cmd in COMMANDS:
        for sub in ("a", "b"):
            assert main([*cmd, "--seed", str(SEED), "--out", str(tmp_path / cmd[0] / sub)]) == 0
        for fa in sorted((tmp_path / cmd[0] / "a").glob("*.csv")):
            count += 1
            if fa.read_bytes() != (tmp_path / cmd[0] / "b" / fa.name).read_bytes():
                mismatched.append(fa.name)
    assert record(9, "fixed-seed reruns give byte-identical CSVs", not mismatched and count > 0,
                  f"{count} CSV files compared, {len(mismatched)} differ")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
