import csv
import os

import numpy as np
import pytest

from ranksubset.cli import BENCH_COLUMNS, SIM_COLUMNS, main


def write_fit_csv(path, n=200, seed=0):
    rng = np.random.default_rng(seed)
    x1 = rng.standard_normal(n)
    x2 = rng.standard_normal(n)
    y = np.exp(2.0 * x1)            # noiseless monotone function of x1 only
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y", "x1", "x2"])
        for row in zip(y, x1, x2):
            w.writerow([f"{v:.10g}" for v in row])
    return path


def test_fit_selects_single_signal_column(tmp_path, capsys):
    path = write_fit_csv(tmp_path / "d.csv")
    rc = main(["fit", str(path), "--smax", "2"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "x1" in out.split("gic path")[0]
    assert "x2" not in out.split("gic path")[0]


def test_fit_writes_coefficient_csv(tmp_path):
    path = write_fit_csv(tmp_path / "d.csv")
    out = tmp_path / "coef.csv"
    rc = main(["fit", str(path), "--smax", "2", "--out", str(out)])
    assert rc == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["variable", "coefficient"]
    assert rows[1][0] == "x1"


def test_fit_constant_column_warning(tmp_path, capsys):
    path = tmp_path / "d.csv"
    rng = np.random.default_rng(1)
    x1 = rng.standard_normal(100)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y", "x1", "c"])
        for yi, xi in zip(3 * x1, x1):
            w.writerow([f"{yi:.8g}", f"{xi:.8g}", "7.0"])
    rc = main(["fit", str(path)])
    captured = capsys.readouterr()
    assert rc == 0
    assert "constant" in captured.err
    assert "'c'" in captured.err


def test_fit_smax_one_gives_one_gic_row(tmp_path, capsys):
    path = write_fit_csv(tmp_path / "d.csv")
    rc = main(["fit", str(path), "--smax", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.count("  s=") == 1


def test_fit_malformed_csv_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("y,x1\n1.0,2.0\n3.0\n")   # short row
    assert main(["fit", str(path)]) == 2
    assert "row 3" in capsys.readouterr().err


def test_fit_non_numeric_exit_3(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("y,x1,x2\n1.0,2.0,3.0\n2.0,oops,1.0\n")
    assert main(["fit", str(path)]) == 3
    err = capsys.readouterr().err
    assert "row 3" in err and "x1" in err


def test_fit_missing_response_exit_2(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n3,4\n")
    assert main(["fit", str(path)]) == 2


def test_simulate_schema_and_row_count(tmp_path):
    out = tmp_path / "res.csv"
    rc = main(["simulate", "--n", "120", "--p", "30", "--sparsity", "3",
               "--reps", "2", "--seed", "5", "--method", "rankabess",
               "--method", "ranklasso", "--out", str(out)])
    assert rc == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == SIM_COLUMNS
    assert len(rows) == 3   # header + one row per method
    assert os.path.exists(str(out) + ".config")


def test_simulate_reproducible_across_runs_and_threads(tmp_path):
    args = ["simulate", "--n", "120", "--p", "30", "--sparsity", "3",
            "--reps", "3", "--seed", "9", "--method", "rankabess"]
    paths = [tmp_path / f"r{i}.csv" for i in range(3)]
    assert main(args + ["--threads", "1", "--out", str(paths[0])]) == 0
    assert main(args + ["--threads", "1", "--out", str(paths[1])]) == 0
    assert main(args + ["--threads", "8", "--out", str(paths[2])]) == 0
    blobs = [p.read_bytes() for p in paths]
    assert blobs[0] == blobs[1] == blobs[2]


def test_simulate_grid_rows(tmp_path):
    out = tmp_path / "res.csv"
    rc = main(["simulate", "--n", "100,150", "--p", "25", "--sparsity", "2",
               "--reps", "1", "--method", "rankabess", "--out", str(out)])
    assert rc == 0
    rows = list(csv.reader(open(out)))
    assert len(rows) == 3
    assert [r[0] for r in rows[1:]] == ["100", "150"]


def test_simulate_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text("n=100\np=25\nsparsity=2\nreps=1\nmethod=rankabess\nseed=3\n")
    out = tmp_path / "res.csv"
    rc = main(["simulate", "--config", str(cfg), "--p", "30", "--out", str(out)])
    assert rc == 0
    rows = list(csv.reader(open(out)))
    assert rows[1][1] == "30"   # flag overrides config file


def test_simulate_unknown_config_key_exit_2(tmp_path, capsys):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text("n=100\nwhatever=1\n")
    assert main(["simulate", "--config", str(cfg)]) == 2
    assert "whatever" in capsys.readouterr().err


def test_simulate_unknown_method_exit_2(tmp_path):
    assert main(["simulate", "--n", "100", "--method", "zzz"]) == 2


def test_benchmark_rows_and_schema(tmp_path):
    out = tmp_path / "bench.csv"
    rc = main(["benchmark", "--sweep", "p", "--values", "50,100", "--n", "80",
               "--sparsity", "2", "--reps", "2", "--method", "rankabess",
               "--out", str(out)])
    assert rc == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == BENCH_COLUMNS
    assert len(rows) == 3
    assert [r[1] for r in rows[1:]] == ["50", "100"]


def test_benchmark_without_methods_exit_2():
    assert main(["benchmark", "--sweep", "p", "--values", "50"]) == 2


def test_threads_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("RANKSUBSET_THREADS", "2")
    out = tmp_path / "res.csv"
    rc = main(["simulate", "--n", "100", "--p", "20", "--sparsity", "2",
               "--reps", "1", "--method", "rankabess", "--out", str(out)])
    assert rc == 0
    assert "threads=2" in (tmp_path / "res.csv.config").read_text()
