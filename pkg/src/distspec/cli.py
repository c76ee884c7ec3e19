"""Command line interface.

Subcommands: ``sample``, ``spectrum``, ``trace-dist``, ``operator``, ``growth``
and ``check``.  Every option can also come from a flat JSON config file given
with ``--config``; command-line flags override config values, which override
the defaults.  Replication ``r`` always draws from the stream derived from
``(seed, r)`` (see :mod:`distspec.rng`), at every order ``n``.

Exit codes: 0 success, 1 failed check, 2 invalid input, 3 unsupported
triple, 4 insufficient data.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import plots
from .eig import (
    eigenvalues_symmetric,
    estimate_growth_exponent,
    frobenius_sq,
    normalizer,
    power_sum,
    rescale,
)
from .errors import DistspecError, InsufficientDataError, InvalidInputError
from .export import (
    write_json,
    write_minor_bin,
    write_minor_csv,
    write_operator_csv,
    write_spectrum_csv,
    write_table_csv,
)
from .heavytail import (
    MIN_CALIBRATION,
    fit_levy,
    levy_cdf,
    trace_replications,
    trace_value_from_line,
)
from .inference import iqr, iqr_ratio_report
from .matdist import permute_minor, sample_minor
from .opspec import (
    analytic_circle_spectrum,
    compare_empirical_to_operator,
    nystrom_spectrum,
)
from .rng import ALGORITHM, check_seed, replication_stream, stream_label
from .triples import check_metric_axioms, get_triple, sample_points

CALIBRATION_BATCH = 1
CONCENTRATION_RATIO = 0.5


@dataclass
class ExperimentConfig:
    triple: str = "unit-interval"
    n: int = 100
    orders: list[int] = field(default_factory=lambda: [128, 256, 512, 1024])
    reps: int = 1
    seed: int = 0
    norm: str = "raw"
    beta: float | None = None
    grid: int = 512
    kmax: int = 64
    top: int = 5
    out: str = "."
    plots: bool = False

    def __post_init__(self):
        get_triple(self.triple)
        self.n, self.reps = int(self.n), int(self.reps)
        self.orders = [int(v) for v in self.orders]
        if self.n < 1 or any(v < 1 for v in self.orders):
            raise InvalidInputError("orders must be >= 1")
        if self.reps < 1:
            raise InvalidInputError("reps must be >= 1")
        self.seed = check_seed(self.seed)
        if self.beta is not None and self.norm == "raw":
            self.norm = "power"
        normalizer(1, self.norm, self.beta)

    @property
    def triple_obj(self):
        return get_triple(self.triple)

    @property
    def tag(self) -> str:
        return self.triple.replace(":", "-")

    def stream(self, rep: int, batch: int | None = None):
        return replication_stream(self.seed, rep, batch)

    def label(self, rep: int, batch: int | None = None) -> str:
        return stream_label(self.seed, rep, batch)

    def outdir(self) -> Path:
        p = Path(self.out)
        try:
            p.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise InvalidInputError(f"cannot create output directory {p}: {exc}") from exc
        return p

    def header(self, **extra) -> dict:
        return {"triple": self.triple, "seed": self.seed, "rng": ALGORITHM, **extra}


# -- commands ---------------------------------------------------------------


def cmd_sample(cfg: ExperimentConfig) -> dict:
    """One CSV and one binary minor file per replication."""
    out, t = cfg.outdir(), cfg.triple_obj
    files = []
    for r in range(cfg.reps):
        m = sample_minor(t, cfg.n, cfg.stream(r), cfg.label(r))
        stem = out / f"minor_{cfg.tag}_n{cfg.n}_rep{r}_seed{cfg.seed}"
        files.append(str(write_minor_csv(stem.with_suffix(".csv"), m, rep=r, rng=ALGORITHM)))
        files.append(str(write_minor_bin(stem.with_suffix(".bin"), m)))
    return {"triple": cfg.triple, "n": cfg.n, "reps": cfg.reps, "seed": cfg.seed, "files": files}


def cmd_spectrum(cfg: ExperimentConfig) -> dict:
    """Per-replication spectra under the configured normalization, pooled histogram."""
    out, t = cfg.outdir(), cfg.triple_obj
    a_n = normalizer(cfg.n, cfg.norm, cfg.beta)
    pooled, traces, files = [], [], []
    for r in range(cfg.reps):
        raw = eigenvalues_symmetric(sample_minor(t, cfg.n, cfg.stream(r), cfg.label(r)))
        sm = rescale(raw, a_n)
        trace = power_sum(raw, 1)
        traces.append(trace)
        pooled.append(sm.atoms)
        path = out / f"spectrum_{cfg.tag}_n{cfg.n}_rep{r}_seed{cfg.seed}.csv"
        write_spectrum_csv(
            path, sm.atoms,
            footer={"trace_sum": trace, "scaled_sum": power_sum(sm, 1)},
            **cfg.header(n=cfg.n, scale=a_n, rep=r, stream=cfg.label(r)),
        )
        files.append(str(path))
    atoms = np.concatenate(pooled)
    lo, hi = float(atoms.min()), float(atoms.max())
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, 61)
    counts, _ = np.histogram(atoms, bins=edges)
    hist = out / f"spectrum_{cfg.tag}_n{cfg.n}_seed{cfg.seed}_histogram.csv"
    write_table_csv(hist, ["bin_lo", "bin_hi", "count"],
                    zip(edges[:-1], edges[1:], counts.tolist()),
                    **cfg.header(n=cfg.n, scale=a_n, reps=cfg.reps))
    files.append(str(hist))
    eps = 1e-3 * max(abs(lo), abs(hi))
    summary = {
        "triple": cfg.triple, "n": cfg.n, "reps": cfg.reps, "seed": cfg.seed,
        "rng": ALGORITHM, "normalization": cfg.norm, "scale": a_n,
        "trace_sums": traces,
        "max_abs_trace_sum": float(np.max(np.abs(traces))),
        "atoms_near_zero": int(np.count_nonzero(np.abs(atoms) < eps)),
        "near_zero_eps": eps,
    }
    write_json(out / f"spectrum_{cfg.tag}_n{cfg.n}_seed{cfg.seed}_summary.json", summary)
    if cfg.plots:
        files.append(str(plots.spectrum_histogram(
            out / f"spectrum_{cfg.tag}_n{cfg.n}_seed{cfg.seed}.svg", atoms, edges,
            title=f"{cfg.triple}, n={cfg.n}, a_n={a_n:g}, {cfg.reps} reps")))
    summary["files"] = files
    return summary


def _trace_rows(reps, label_of) -> list:
    rows = []
    for r in range(len(reps)):
        s = None if reps.sums is None else reps.sums[r]
        s2 = None if reps.sum_sqs is None else reps.sum_sqs[r]
        rows.append([r, reps.n, label_of(r), reps.values[r], s, s2])
    return rows


TRACE_COLUMNS = ["rep_index", "n", "seed", "T_n", "sum", "sum_sq"]


def cmd_trace_dist(cfg: ExperimentConfig) -> dict:
    """Replications of ``T_n = tr M_n^2 / (2 n^3)`` and a limit-law report.

    The test batch uses streams ``(seed, r)``; the scale is calibrated on an
    independent batch of the same size from streams ``(seed, r, 1)``.  An
    IQR diagnostic compares order ``n`` with the nested order ``n // 8``.
    Non-square-integrable triples get a Levy fit; square-integrable ones are
    reported as concentrating on ``n^-2 tr M^2 -> int int rho^2``.
    """
    out, t = cfg.outdir(), cfg.triple_obj
    stem = f"trace_{cfg.tag}_n{cfg.n}_seed{cfg.seed}"
    test = trace_replications(t, cfg.n, cfg.reps, cfg.stream, cfg.label)
    head = cfg.header(n=cfg.n, reps=cfg.reps, batch="test")
    files = [str(write_table_csv(out / f"{stem}.csv", TRACE_COLUMNS,
                                 _trace_rows(test, cfg.label), **head))]
    if cfg.reps < MIN_CALIBRATION:
        raise InsufficientDataError(
            f"fit needs reps >= {MIN_CALIBRATION}, got {cfg.reps}; wrote {files[0]}"
        )
    calib = trace_replications(t, cfg.n, cfg.reps,
                               lambda r: cfg.stream(r, CALIBRATION_BATCH),
                               lambda r: cfg.label(r, CALIBRATION_BATCH))
    files.append(str(write_table_csv(
        out / f"{stem}_calibration.csv", TRACE_COLUMNS,
        _trace_rows(calib, lambda r: cfg.label(r, CALIBRATION_BATCH)),
        **cfg.header(n=cfg.n, reps=cfg.reps, batch="calibration"))))

    n_small = max(cfg.n // 8, 2)
    small = trace_replications(t, n_small, cfg.reps, cfg.stream, cfg.label)
    if t.square_integrable:
        stat_name = "n^-2 tr M^2"
        big_stat, small_stat = 2.0 * cfg.n * test.values, 2.0 * n_small * small.values
    else:
        stat_name = "T_n"
        big_stat, small_stat = test.values, small.values
    ratios = iqr_ratio_report({n_small: small_stat, cfg.n: big_stat})
    report = {
        "triple": cfg.triple, "n": cfg.n, "reps": cfg.reps, "seed": cfg.seed,
        "rng": ALGORITHM,
        "diagnostic_statistic": stat_name,
        "iqr_orders": [n_small, cfg.n],
        "iqr": [iqr(small_stat), iqr(big_stat)],
        "iqr_ratio": ratios[cfg.n],
        "concentrating": bool(ratios[cfg.n] <= CONCENTRATION_RATIO),
    }
    if t.square_integrable:
        report.update({
            "mode": "concentration",
            "alpha": None, "scale": None, "ks_distance": None,
            "mean_statistic": float(np.mean(big_stat)),
            "hs_norm_sq": t.hs_norm_sq,
        })
    else:
        fit = fit_levy(test.values, calib.values, cfg.n)
        report.update({"mode": "stable", **fit.as_dict()})
        if cfg.plots:
            files.append(str(plots.ecdf_vs_limit(
                out / f"{stem}_cdf.svg", test.values / fit.scale, levy_cdf,
                title=f"{cfg.triple}, n={cfg.n}: T_n / c* vs Levy CDF")))
    files.append(str(write_json(out / f"{stem}_fit.json", report)))
    report["files"] = files
    return report


def cmd_operator(cfg: ExperimentConfig) -> dict:
    """Operator spectra (Nystrom, and analytic for the circle) plus the
    empirical-versus-operator comparison with ``a_n = n``."""
    out, t = cfg.outdir(), cfg.triple_obj
    ny = nystrom_spectrum(t, cfg.grid)
    files = [str(write_operator_csv(
        out / f"operator_{cfg.tag}_nystrom_grid{cfg.grid}.csv", ny,
        triple=cfg.triple, monte_carlo_nodes=ny.approximate, ordering="abs-desc"))]
    report = {"triple": cfg.triple, "grid": cfg.grid, "seed": cfg.seed, "rng": ALGORITHM,
              "nystrom_top": ny.top(cfg.top)}
    series = {f"Nystrom (grid {cfg.grid})": ny.top(cfg.top)}
    if t.name == "circle":
        an = analytic_circle_spectrum(cfg.kmax)
        files.append(str(write_operator_csv(
            out / f"operator_{cfg.tag}_analytic_kmax{cfg.kmax}.csv", an,
            triple=cfg.triple, ordering="abs-desc")))
        k = min(cfg.top, len(an.eigenvalues), len(ny.eigenvalues))
        report["analytic_top"] = an.top(cfg.top)
        report["nystrom_vs_analytic_max_dev"] = float(np.max(np.abs(ny.top(k) - an.top(k))))
        series[f"analytic (k_max {cfg.kmax})"] = an.top(cfg.top)
    top = min(cfg.top, cfg.n)
    cmp = compare_empirical_to_operator(t, cfg.n, cfg.reps, top, cfg.stream, cfg.grid, cfg.kmax)
    report["comparison"] = cmp.as_dict()
    report["monte_carlo_caveat"] = bool(cmp.operator.approximate or ny.approximate)
    series[f"empirical mean, n={cfg.n}"] = cmp.empirical.mean(axis=0)
    if cfg.plots:
        files.append(str(plots.eigenvalue_stems(
            out / f"operator_{cfg.tag}_n{cfg.n}.svg", series, title=cfg.triple)))
    files.append(str(write_json(out / f"operator_{cfg.tag}_n{cfg.n}_seed{cfg.seed}_report.json",
                                report)))
    report["files"] = files
    return report


def cmd_growth(cfg: ExperimentConfig) -> dict:
    out, t = cfg.outdir(), cfg.triple_obj
    fit = estimate_growth_exponent(t, cfg.orders, cfg.reps,
                                   streams=lambda r, n: cfg.stream(r))
    stem = out / f"growth_{cfg.tag}_seed{cfg.seed}"
    files = [str(write_table_csv(stem.with_suffix(".csv"), ["n", "median_tr_M2"],
                                 zip(fit.orders, fit.medians),
                                 **cfg.header(reps=cfg.reps)))]
    report = {"triple": cfg.triple, "reps": cfg.reps, "seed": cfg.seed, "rng": ALGORITHM,
              "orders": fit.orders, "medians": fit.medians, "beta": fit.beta,
              "eigen_exponent": fit.eigen_exponent}
    if cfg.plots:
        files.append(str(plots.growth_loglog(stem.with_suffix(".svg"), fit.orders,
                                             fit.medians, fit.beta, title=cfg.triple)))
    files.append(str(write_json(stem.with_suffix(".json"), report)))
    report["files"] = files
    return report


def cmd_check(cfg: ExperimentConfig) -> dict:
    """Metric-axiom and identity property suites over all built-in triples."""
    results = {}
    trials = max(cfg.reps, 1000)
    for i, name in enumerate(["cauchy-line", "unit-interval", "circle", "sphere:1", "sphere:2"]):
        rep = check_metric_axioms(get_triple(name), trials, cfg.stream(i))
        results[f"axioms[{name}]"] = {**asdict(rep), "passed": rep.passed}

    g = cfg.stream(100)
    cauchy = get_triple("cauchy-line")
    worst = 0.0
    for n in (3, 10, 100):
        for _ in range(100):
            x = sample_points(cauchy, n, g).ravel()
            lhs = trace_value_from_line(x).value * n**3
            d = x[:, None] - x[None, :]
            rhs = math.fsum((d[np.triu_indices(n, 1)] ** 2).tolist())
            worst = max(worst, abs(lhs - rhs) / rhs)
    results["power-sum identity"] = {"worst_rel_err": worst, "passed": worst <= 1e-9}

    g = cfg.stream(101)
    worst_perm, worst_frob, worst_trace = 0.0, 0.0, 0.0
    for name in ("unit-interval", "circle", "sphere:2"):
        t = get_triple(name)
        for _ in range(5):
            m = sample_minor(t, 60, g)
            sm = eigenvalues_symmetric(m)
            pm = permute_minor(m, g.permutation(m.n))
            scale = 1.0 + float(np.linalg.norm(m.entries))
            worst_perm = max(worst_perm, float(np.max(np.abs(
                eigenvalues_symmetric(pm).atoms - sm.atoms))) / scale)
            fro = frobenius_sq(m)
            worst_frob = max(worst_frob, abs(power_sum(sm, 2) - fro) / fro)
            worst_trace = max(worst_trace, abs(power_sum(sm, 1)) /
                              (m.n * float(np.max(np.abs(sm.atoms)))))
    results["permutation invariance"] = {"worst": worst_perm, "passed": worst_perm <= 1e-6}
    results["frobenius identity"] = {"worst_rel_err": worst_frob, "passed": worst_frob <= 1e-6}
    results["trace identity"] = {"worst": worst_trace, "passed": worst_trace <= 1e-8}
    report = {"seed": cfg.seed, "rng": ALGORITHM, "checks": results,
              "passed": all(v["passed"] for v in results.values())}
    write_json(cfg.outdir() / f"check_seed{cfg.seed}.json", report)
    return report


COMMANDS = {
    "sample": cmd_sample,
    "spectrum": cmd_spectrum,
    "trace-dist": cmd_trace_dist,
    "operator": cmd_operator,
    "growth": cmd_growth,
    "check": cmd_check,
}

# per-command defaults layered under config file and flags
DEFAULTS = {
    "sample": {"reps": 1},
    "spectrum": {"reps": 1},
    "trace-dist": {"reps": 400, "n": 1000},
    "operator": {"reps": 10, "n": 200},
    "growth": {"reps": 20},
    "check": {"reps": 1000},
}


def _orders(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"orders must be comma-separated integers: {text}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON file of option values")
    common.add_argument("--triple", help="cauchy-line | unit-interval | circle | sphere:d")
    common.add_argument("--n", type=int, help="order of the minors")
    common.add_argument("--orders", type=_orders, help="comma-separated orders (growth)")
    common.add_argument("--reps", type=int, help="number of replications")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--norm", choices=["raw", "n", "power"], help="spectrum normalization a_n")
    common.add_argument("--beta", type=float, help="use a_n = n^beta")
    common.add_argument("--grid", type=int, help="Nystrom grid size")
    common.add_argument("--kmax", type=int, help="max frequency of the analytic circle spectrum")
    common.add_argument("--top", type=int, help="number of leading eigenvalues compared")
    common.add_argument("--out", help="output directory")
    common.add_argument("--plots", action="store_true", default=None, help="also write SVG figures")

    parser = argparse.ArgumentParser(
        prog="distspec",
        description="Spectra of random distance matrices of metric measure spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(fn.__doc__ or "").split("\n")[0])
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    values = dict(DEFAULTS[args.command])
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise InvalidInputError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidInputError("config must be a flat JSON object")
        known = set(ExperimentConfig.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise InvalidInputError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for key in ExperimentConfig.__dataclass_fields__:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return ExperimentConfig(**values)


def _brief(result: dict) -> str:
    skip = {"files", "trace_sums"}
    return json.dumps({k: v for k, v in result.items() if k not in skip},
                      default=lambda o: o.tolist() if hasattr(o, "tolist") else str(o))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        result = COMMANDS[args.command](cfg)
    except DistspecError as exc:
        print(f"distspec {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (TypeError, ValueError) as exc:
        print(f"distspec {args.command}: error: {exc}", file=sys.stderr)
        return InvalidInputError.exit_code
    print(_brief(result))
    if args.command == "check" and not result["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
