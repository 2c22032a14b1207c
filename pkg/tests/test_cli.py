import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from sxpid.cli import main, parse_groups, InputError
from sxpid.decomposition import PidDecomposition
from sxpid.gaussian import make_gate


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture
def sum_csv(tmp_path):
    path = tmp_path / "sum.csv"
    assert run("gate-sample", "--gate", "sum", "--n", 2000, "--seed", 7, "--output", path) == 0
    return path


def test_parse_groups():
    assert parse_groups("1,2;3") == [[1, 2], [3]]
    for bad in ["1;;2", "a", "0"]:
        with pytest.raises(InputError):
            parse_groups(bad)


def test_gate_sample_shape_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("gate-sample", "--gate", "copy", "--n", 100, "--seed", 1, "--output", a) == 0
    assert run("gate-sample", "--gate", "copy", "--n", 100, "--seed", 1, "--output", b) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(a.open()))
    assert rows[0] == ["T1", "T2", "S1", "S2"] and len(rows) == 101


def test_gate_sample_covariance(tmp_path):
    path = tmp_path / "r.csv"
    n = 1000
    run("gate-sample", "--gate", "redundant", "--n", n, "--seed", 0, "--output", path)
    x = np.loadtxt(path, delimiter=",", skiprows=1)
    assert x.shape == (n, 3)
    assert np.abs(np.cov(x.T) - make_gate("redundant").covariance).max() < 3 / np.sqrt(n)


def test_estimate_round_trip_and_reproducible(sum_csv, tmp_path, capsys):
    out1, out2 = tmp_path / "1.json", tmp_path / "2.json"
    assert run("estimate", "--input", sum_csv, "--sources", "2;3", "--target", 1, "--output", out1) == 0
    assert run("estimate", "--input", sum_csv, "--sources", "2;3", "--target", 1, "--output", out2) == 0
    assert out1.read_bytes() == out2.read_bytes()
    data = json.loads(out1.read_text())
    assert set(data["antichains"]) == {"{1}{2}", "{1}", "{2}", "{1,2}"}
    assert data["schema_version"] == 1
    meta = data["metadata"]
    assert meta["k"] == 4 and meta["n_samples"] == 2000 and meta["preprocess"] == "none"
    assert "tool_version" in meta and meta["seed"] == 0
    pid = PidDecomposition.from_json(out1.read_text())
    assert pid.to_json() + "\n" == out1.read_text()
    assert "antichain" in capsys.readouterr().out


def test_estimate_multidimensional_groups(tmp_path):
    path = tmp_path / "copy.csv"
    run("gate-sample", "--gate", "copy", "--n", 300, "--output", path)
    out = tmp_path / "o.json"
    assert run("estimate", "--input", path, "--sources", "3,4", "--target", "1,2", "--output", out) == 0
    assert json.loads(out.read_text())["n_sources"] == 1


def test_malformed_csv(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n4,oops,6\n")
    assert run("estimate", "--input", path, "--sources", "1;2", "--target", 3) == 2
    assert "row 3, column 2" in capsys.readouterr().err
    path.write_text("a,b,c\n1,2\n")
    assert run("estimate", "--input", path, "--sources", "1;2", "--target", 3) == 2


def test_bad_column_groups(sum_csv):
    assert run("estimate", "--input", sum_csv, "--sources", "1;2", "--target", 2) == 2
    assert run("estimate", "--input", sum_csv, "--sources", "1;5", "--target", 3) == 2


def test_constant_column_standardize(tmp_path):
    rng = np.random.default_rng(0)
    x = np.column_stack([rng.normal(size=(50, 2)), np.ones(50)])
    path = tmp_path / "c.csv"
    np.savetxt(path, x, delimiter=",", header="a,b,t", comments="")
    assert run("estimate", "--input", path, "--sources", "1;2", "--target", 3, "--preprocess", "standardize") == 3


def test_non_finite_rows_dropped(tmp_path, capsys):
    rng = np.random.default_rng(0)
    x = rng.normal(size=(40, 3))
    x[3, 1] = np.nan
    x[9, 0] = np.inf
    path = tmp_path / "n.csv"
    np.savetxt(path, x, delimiter=",", header="a,b,t", comments="")
    out = tmp_path / "o.json"
    assert run("estimate", "--input", path, "--sources", "1;2", "--target", 3, "--output", out) == 0
    meta = json.loads(out.read_text())["metadata"]
    assert meta["dropped_rows"] == 2 and meta["n_samples"] == 38
    assert "dropped 2" in capsys.readouterr().err


def test_too_few_rows(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("a,b,t\n1,2,3\n2,3,4\n")
    assert run("estimate", "--input", path, "--sources", "1;2", "--target", 3) == 2


def test_degenerate_geometry_exit_zero(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.normal(size=(20, 3))
    path = tmp_path / "d.csv"
    np.savetxt(path, np.vstack([x, x]), delimiter=",", header="a,b,t", comments="")
    out = tmp_path / "o.json"
    assert run("estimate", "--input", path, "--sources", "1;2", "--target", 3, "--k", 1, "--output", out) == 0
    assert "degenerate-geometry" in json.loads(out.read_text())["metadata"]["warnings"]
    assert run("estimate", "--input", path, "--sources", "1;2", "--target", 3, "--k", 1, "--jitter", "--output", out) == 0
    assert json.loads(out.read_text())["metadata"]["warnings"] == []


def test_oracle_output(tmp_path):
    out = tmp_path / "o.json"
    assert run("oracle", "--gate", "unique", "--n", 20000, "--output", out) == 0
    pid = PidDecomposition.from_json(out.read_text())
    assert pid.metadata["method"] == "gaussian-oracle"
    assert abs(pid.atom("{1}{2}") + pid.atom("{2}")) < 0.05


def test_convergence_rows(tmp_path):
    out = tmp_path / "c.csv"
    assert run("convergence", "--gate", "redundant", "--grid", "3,500", "--repeats", 2, "--output", out) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 2 * 2 * 4
    assert all(r["status"].startswith("error") for r in rows if r["N"] == "3")
    assert all(r["status"] == "ok" for r in rows if r["N"] == "500")
    assert run("convergence", "--gate", "sum", "--grid", "500,100") == 2


def test_lattice_dump(capsys):
    assert run("lattice", 3) == 0
    assert len(json.loads(capsys.readouterr().out)["nodes"]) == 18


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sxpid", "lattice", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and '"{1}{2}"' in proc.stdout
