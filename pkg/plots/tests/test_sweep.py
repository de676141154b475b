import csv
import os
import subprocess
import sys

import numpy as np
import pandas as pd
import pytest

from roblangevin_plots import PlotError, PlotSpec, plot_sweep
from roblangevin_plots.cli import main_sweep

HEADER = ["experiment", "method", "n", "d", "eps", "seed", "recovery_error",
          "avg_test_loglik", "w2_sq", "wall_time_ms", "step_size",
          "burn_in", "n_samples"]


def write_results(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HEADER)
        for r in rows:
            w.writerow(r)


def make_rows(methods=("ula", "robula"), ns=(100, 300, 1000), seeds=5,
              base=1.0, diverge_at=None):
    rng = np.random.default_rng(0)
    rows = []
    for m in methods:
        for n in ns:
            for s in range(seeds):
                err = repr(base * (1 + (m == "ula")) * 100 / n + rng.uniform(0, 0.1))
                if diverge_at == (m, n, s):
                    err = "diverged"
                rows.append(["mean-est", m, n, 10, 0.2, s, err, repr(-1.5),
                             repr(0.01), "12.0", "0.001", "300", "1000"])
    return rows


class TestPlotSweep:
    def test_shapes_and_sidecar(self, tmp_path):
        path = str(tmp_path / "res.csv")
        write_results(path, make_rows())
        out = str(tmp_path / "fig.png")
        side = plot_sweep(PlotSpec(csv_path=path, x="n", y="recovery_error", out=out))
        assert os.path.exists(out) and os.path.getsize(out) > 0
        agg = pd.read_csv(side)
        assert list(agg.columns) == ["method", "n", "recovery_error_mean",
                                     "recovery_error_std", "count"]
        assert len(agg) == 6  # 2 methods x 3 sweep points
        assert set(agg["count"]) == {5}

    def test_sidecar_matches_independent_means(self, tmp_path):
        path = str(tmp_path / "res.csv")
        rows = make_rows()
        write_results(path, rows)
        out = str(tmp_path / "fig.png")
        side = plot_sweep(PlotSpec(csv_path=path, x="n", y="recovery_error", out=out))
        agg = pd.read_csv(side)
        for _, row in agg.iterrows():
            vals = [float(r[6]) for r in rows
                    if r[1] == row["method"] and r[2] == row["n"]]
            assert abs(row["recovery_error_mean"] - np.mean(vals)) <= 1e-9

    def test_rerun_is_bit_identical(self, tmp_path):
        path = str(tmp_path / "res.csv")
        write_results(path, make_rows())
        sides = []
        for name in ("a.png", "b.png"):
            side = plot_sweep(PlotSpec(csv_path=path, x="n",
                                       y="recovery_error",
                                       out=str(tmp_path / name)))
            sides.append(open(side, "rb").read())
        assert sides[0] == sides[1]

    def test_single_method(self, tmp_path):
        path = str(tmp_path / "res.csv")
        write_results(path, make_rows(methods=("robula",)))
        out = str(tmp_path / "fig.png")
        side = plot_sweep(PlotSpec(csv_path=path, x="n", y="recovery_error", out=out))
        agg = pd.read_csv(side)
        assert set(agg["method"]) == {"robula"} and len(agg) == 3

    def test_diverged_cells_dropped_with_count(self, tmp_path, capsys):
        path = str(tmp_path / "res.csv")
        write_results(path, make_rows(diverge_at=("ula", 100, 0)))
        out = str(tmp_path / "fig.png")
        side = plot_sweep(PlotSpec(csv_path=path, x="n", y="recovery_error", out=out))
        assert "dropped 1 rows" in capsys.readouterr().err
        agg = pd.read_csv(side)
        cell = agg[(agg["method"] == "ula") & (agg["n"] == 100)]
        assert int(cell["count"].iloc[0]) == 4

    def test_errors(self, tmp_path):
        with pytest.raises(PlotError, match="x:"):
            PlotSpec(csv_path="x.csv", x="sigma", y="recovery_error", out="f.png")
        with pytest.raises(PlotError, match="y:"):
            PlotSpec(csv_path="x.csv", x="n", y="loss", out="f.png")

        path = str(tmp_path / "bad.csv")
        with open(path, "w") as fh:
            fh.write("a,b\n1,2\n")
        with pytest.raises(PlotError, match="method"):
            plot_sweep(PlotSpec(csv_path=path, x="n", y="recovery_error",
                                out=str(tmp_path / "f.png")))

        # all cells diverged -> empty selection
        path2 = str(tmp_path / "div.csv")
        rows = make_rows(ns=(100, 300), seeds=1)
        for r in rows:
            r[6] = "diverged"
        write_results(path2, rows)
        with pytest.raises(PlotError, match="no usable rows"):
            plot_sweep(PlotSpec(csv_path=path2, x="n", y="recovery_error",
                                out=str(tmp_path / "f.png")))

        # constant x -> degenerate sweep
        path3 = str(tmp_path / "const.csv")
        write_results(path3, make_rows(ns=(500,)))
        with pytest.raises(PlotError, match="does not vary"):
            plot_sweep(PlotSpec(csv_path=path3, x="n", y="recovery_error",
                                out=str(tmp_path / "f.png")))


class TestCli:
    def test_roundtrip(self, tmp_path, capsys):
        path = str(tmp_path / "res.csv")
        write_results(path, make_rows())
        out = str(tmp_path / "fig.png")
        rc = main_sweep(["--csv", path, "--x", "n", "--y", "recovery_error",
                         "--out", out])
        assert rc == 0
        assert os.path.exists(out)
        assert "wrote" in capsys.readouterr().out

    def test_error_exit_code(self, tmp_path, capsys):
        rc = main_sweep(["--csv", str(tmp_path / "missing.csv"), "--x", "n",
                         "--y", "recovery_error", "--out", str(tmp_path / "f.png")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


@pytest.mark.slow
def test_harness_desk_csv_sidecar_matches_recomputation(tmp_path):
    """End-to-end: run the benchmark harness CLI over the desk-scale sample
    size sweep, plot it, and check the sidecar against an independent
    recomputation of per-cell means."""
    res = str(tmp_path / "desk.csv")
    proc = subprocess.run(
        [sys.executable, "-m", "roblangevin.cli", "mean-est", "--d", "10",
         "--eps", "0.2", "--runs", "5", "--seed", "123",
         "--sweep", "n=100,300,1000", "--out", res],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    out = str(tmp_path / "fig1.png")
    side = plot_sweep(PlotSpec(csv_path=res, x="n", y="recovery_error", out=out))
    assert os.path.getsize(out) > 0

    cells = {}
    with open(res, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            cells.setdefault((row["method"], int(row["n"])), []).append(
                float(row["recovery_error"]))
    agg = pd.read_csv(side)
    assert len(agg) == len(cells)
    for _, row in agg.iterrows():
        expect = sum(cells[(row["method"], int(row["n"]))]) / 5.0
        assert abs(row["recovery_error_mean"] - expect) <= 1e-9
