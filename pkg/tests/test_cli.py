import json
import subprocess
import sys

import pytest

from sqaoa.cli import main
from sqaoa.experiments import calibrate_topology, read_csv
from sqaoa.model import save_instance


@pytest.fixture
def canon8(tmp_path):
    path = tmp_path / "canon8.json"
    save_instance(calibrate_topology().instance(8, (4, 4, 3)), path)
    return path


def test_info(canon8, capsys):
    assert main(["info", "--instance", str(canon8)]) == 0
    out = capsys.readouterr().out
    assert "6561" in out and "2557.11" in out and "dual_basis      570" in out


def test_solve_exact(canon8, tmp_path, capsys):
    out = tmp_path / "ex"
    assert main(["solve", "--instance", str(canon8), "--method", "exact", "--out", str(out)]) == 0
    meta, rows = read_csv(out / "report.csv")
    vals = {r["key"]: r["value"] for r in rows}
    assert vals["conflicts"] == "2"
    assert meta["seed"] == "42"


def test_solve_dicke_xy(canon8, tmp_path):
    out = tmp_path / "dx"
    rc = main(["solve", "--instance", str(canon8), "--method", "dicke-xy", "--seed", "7",
               "--budget", "80", "--shots", "1024", "--out", str(out)])
    assert rc == 0
    meta, rows = read_csv(out / "report.csv")
    vals = {r["key"]: r["value"] for r in rows}
    assert vals["feasibility_ratio"] == "1"
    assert meta["seed"] == "7"
    _, trace = read_csv(out / "trace.csv")
    assert 1 <= len(trace) <= 80


def test_malformed_instance(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 2, "m": 3, "edges": [[0, 5]], "demands": [1, 1]}))
    assert main(["info", "--instance", str(bad)]) != 0
    err = capsys.readouterr().err
    assert "edge (0, 5)" in err


def test_bad_flag_exits_nonzero(canon8):
    with pytest.raises(SystemExit) as e:
        main(["solve", "--instance", str(canon8), "--shots", "0"])
    assert e.value.code != 0


def test_experiment_reduction_module_entry(tmp_path):
    out = tmp_path / "red"
    proc = subprocess.run([sys.executable, "-m", "sqaoa", "experiment", "reduction",
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "PASS" in proc.stdout
    assert (out / "reduction.svg").exists()
    meta, rows = read_csv(out / "reduction.csv")
    assert meta["seed"] == "42" and len(rows) == 2


def test_threads_env(monkeypatch):
    from sqaoa.cli import _threads, build_parser
    args = build_parser().parse_args(["experiment", "tables"])
    monkeypatch.setenv("SQAOA_THREADS", "3")
    assert _threads(args) == 3
    args = build_parser().parse_args(["experiment", "tables", "--threads", "2"])
    assert _threads(args) == 2
