import json
import math
import subprocess
import sys

import numpy as np
import pytest

from conftest import SEED
from distspec.cli import ExperimentConfig, main
from distspec.errors import InvalidInputError
from distspec.export import read_header, read_minor_csv, read_spectrum_csv, read_table_csv
from distspec.rng import replication_stream


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path), "--seed", str(SEED)])


def files(path, pattern):
    return sorted(path.glob(pattern))


def test_seed_stream_is_spawn_child():
    ss = np.random.SeedSequence(SEED)
    child = ss.spawn(4)[3]
    a = np.random.Generator(np.random.PCG64(child)).random(5)
    np.testing.assert_array_equal(a, replication_stream(SEED, 3).random(5))
    assert not np.array_equal(replication_stream(SEED, 3, 1).random(5), a)


def test_sample_writes_symmetric_hollow_csv(tmp_path):
    assert run(tmp_path, "sample", "--triple", "unit-interval", "--n", "4", "--reps", "1") == 0
    csvs = files(tmp_path, "minor_*.csv")
    assert len(csvs) == 1 and "unit-interval" in csvs[0].name and "n4" in csvs[0].name
    m = read_minor_csv(csvs[0])
    assert m.entries.shape == (4, 4)
    assert np.array_equal(m.entries, m.entries.T) and np.all(np.diag(m.entries) == 0)
    assert "rng" in read_header(csvs[0])
    assert len(files(tmp_path, "minor_*.bin")) == 1


def test_sample_is_byte_identical(tmp_path):
    for sub in ("a", "b"):
        assert run(tmp_path / sub, "sample", "--triple", "sphere:2", "--n", "6", "--reps", "3") == 0
    for fa in files(tmp_path / "a", "*"):
        assert fa.read_bytes() == (tmp_path / "b" / fa.name).read_bytes()


def test_adding_reps_keeps_earlier_outputs(tmp_path):
    run(tmp_path / "a", "sample", "--triple", "circle", "--n", "5", "--reps", "2")
    run(tmp_path / "b", "sample", "--triple", "circle", "--n", "5", "--reps", "4")
    for fa in files(tmp_path / "a", "*"):
        assert fa.read_bytes() == (tmp_path / "b" / fa.name).read_bytes()


def test_unknown_triple(tmp_path, capsys):
    assert run(tmp_path, "sample", "--triple", "foo") == 2
    err = capsys.readouterr().err
    assert "foo" in err and "cauchy-line" in err and "sphere:d" in err


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["sample", "--out", str(blocker / "sub")]) == 2


def test_spectrum_circle_atom_near_half_pi(tmp_path):
    rc = run(tmp_path, "spectrum", "--triple", "circle", "--n", "1000", "--reps", "2",
             "--norm", "n", "--plots")
    assert rc == 0
    spectra = files(tmp_path, "spectrum_*_rep*.csv")
    assert len(spectra) == 2
    pooled = np.concatenate([read_spectrum_csv(p) for p in spectra])
    assert np.any((pooled >= 1.52) & (pooled <= 1.62))
    assert read_header(spectra[0])["scale"] == "1000.0"
    svg = files(tmp_path, "*.svg")
    assert len(svg) == 1 and svg[0].read_text().lstrip().startswith("<?xml")


def test_spectrum_raw_trace_footer(tmp_path):
    assert run(tmp_path, "spectrum", "--triple", "cauchy-line", "--n", "50", "--reps", "3") == 0
    for p in files(tmp_path, "spectrum_*_rep*.csv"):
        meta = read_header(p)
        atoms = read_spectrum_csv(p)
        assert abs(float(meta["trace_sum"])) <= 1e-8 * 50 * np.max(np.abs(atoms))


def test_spectrum_order_one(tmp_path):
    assert run(tmp_path, "spectrum", "--triple", "unit-interval", "--n", "1", "--reps", "2") == 0
    for p in files(tmp_path, "spectrum_*_rep*.csv"):
        np.testing.assert_array_equal(read_spectrum_csv(p), [0.0])


def test_spectrum_power_normalization(tmp_path):
    assert run(tmp_path, "spectrum", "--triple", "unit-interval", "--n", "16", "--beta", "1.5") == 0
    p = files(tmp_path, "spectrum_*_rep*.csv")[0]
    assert float(read_header(p)["scale"]) == pytest.approx(64.0)


def test_trace_dist_cauchy(tmp_path):
    assert run(tmp_path, "trace-dist", "--triple", "cauchy-line", "--n", "5000",
               "--reps", "400", "--plots") == 0
    report = json.loads(files(tmp_path, "*_fit.json")[0].read_text())
    assert report["mode"] == "stable" and report["alpha"] == 0.5
    assert report["ks_distance"] <= 0.08
    assert {"scale", "n", "reps"} <= set(report)
    rows = read_table_csv(tmp_path / f"trace_cauchy-line_n5000_seed{SEED}.csv")
    assert len(rows) == 400
    assert list(rows[0]) == ["rep_index", "n", "seed", "T_n", "sum", "sum_sq"]
    r0 = rows[0]
    n = 5000
    lhs = n * float(r0["sum_sq"]) - float(r0["sum"]) ** 2
    assert n**3 * float(r0["T_n"]) == pytest.approx(lhs, rel=1e-9)
    assert len(files(tmp_path, "*_calibration.csv")) == 1
    assert len(files(tmp_path, "*_cdf.svg")) == 1


def test_trace_dist_unit_interval_concentrates(tmp_path):
    assert run(tmp_path, "trace-dist", "--triple", "unit-interval", "--n", "1000",
               "--reps", "200") == 0
    report = json.loads(files(tmp_path, "*_fit.json")[0].read_text())
    assert report["mode"] == "concentration" and report["concentrating"]
    assert report["alpha"] is None
    assert report["mean_statistic"] == pytest.approx(1 / 6, abs=0.01)


def test_trace_dist_too_few_reps(tmp_path, capsys):
    assert run(tmp_path, "trace-dist", "--triple", "cauchy-line", "--n", "100",
               "--reps", "10") == 4
    assert len(read_table_csv(files(tmp_path, "trace_*.csv")[0])) == 10
    assert not files(tmp_path, "*_fit.json")
    assert "reps" in capsys.readouterr().err


def test_operator_circle(tmp_path):
    assert run(tmp_path, "operator", "--triple", "circle", "--grid", "512", "--kmax", "64",
               "--n", "200", "--reps", "3", "--plots") == 0
    report = json.loads(files(tmp_path, "*_report.json")[0].read_text())
    assert report["nystrom_vs_analytic_max_dev"] <= 1e-3
    assert report["comparison"]["operator_method"] == "analytic"
    assert len(files(tmp_path, "operator_circle_*.csv")) == 2
    rows = read_table_csv(tmp_path / "operator_circle_analytic_kmax64.csv")
    assert float(rows[0]["eigenvalue"]) == pytest.approx(math.pi / 2)


def test_operator_cauchy_unsupported(tmp_path):
    assert run(tmp_path, "operator", "--triple", "cauchy-line") == 3


def test_operator_sphere_caveat(tmp_path):
    assert run(tmp_path, "operator", "--triple", "sphere:2", "--n", "1000", "--reps", "10") == 0
    report = json.loads(files(tmp_path, "*_report.json")[0].read_text())
    assert report["monte_carlo_caveat"] is True
    assert report["comparison"]["monte_carlo_caveat"] is True


def test_growth_command(tmp_path):
    assert run(tmp_path, "growth", "--triple", "unit-interval", "--orders", "32,64,128",
               "--reps", "5", "--plots") == 0
    report = json.loads(files(tmp_path, "growth_*.json")[0].read_text())
    assert 1.8 <= report["beta"] <= 2.2
    assert len(read_table_csv(files(tmp_path, "growth_*.csv")[0])) == 3


def test_growth_bad_orders(tmp_path):
    assert run(tmp_path, "growth", "--orders", "32,64", "--reps", "5") == 2


def test_check_command(tmp_path):
    assert run(tmp_path, "check") == 0
    report = json.loads(files(tmp_path, "check_*.json")[0].read_text())
    assert report["passed"] and len(report["checks"]) >= 8


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"triple": "circle", "n": 3, "reps": 2, "seed": 9}))
    out = tmp_path / "o"
    assert main(["sample", "--config", str(cfg), "--n", "5", "--out", str(out)]) == 0
    names = [p.name for p in files(out, "*.csv")]
    assert names == ["minor_circle_n5_rep0_seed9.csv", "minor_circle_n5_rep1_seed9.csv"]


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tripel": "circle"}))
    assert main(["sample", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_experiment_config_validation():
    with pytest.raises(InvalidInputError):
        ExperimentConfig(reps=0)
    with pytest.raises(InvalidInputError):
        ExperimentConfig(seed=-1)
    with pytest.raises(InvalidInputError):
        ExperimentConfig(seed=2**64)
    assert ExperimentConfig(beta=0.5).norm == "power"


@pytest.mark.parametrize("cmd", [
    ["spectrum", "--triple", "circle", "--n", "30", "--reps", "2", "--norm", "n"],
    ["trace-dist", "--triple", "cauchy-line", "--n", "200", "--reps", "120"],
    ["trace-dist", "--triple", "sphere:2", "--n", "40", "--reps", "100"],
    ["operator", "--triple", "unit-interval", "--grid", "64", "--n", "40", "--reps", "2"],
    ["growth", "--triple", "cauchy-line", "--orders", "16,32,64", "--reps", "4"],
    ["check", "--reps", "200"],
])
def test_commands_are_deterministic(tmp_path, cmd):
    for sub in ("a", "b"):
        assert run(tmp_path / sub, *cmd) == 0
    produced = files(tmp_path / "a", "*.csv") + files(tmp_path / "a", "*.json")
    assert produced
    for fa in produced:
        assert fa.read_bytes() == (tmp_path / "b" / fa.name).read_bytes(), fa.name


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "distspec", "sample", "--n", "3",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 3
