import csv
import json

import numpy as np
import pytest

from centromesh import io
from centromesh.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_paper_example(tmp_path, capsys):
    code, out, _ = _run(capsys, "paper-example", "--out", str(tmp_path))
    assert code == 0
    verdict = json.loads((tmp_path / "verdict.json").read_text())
    assert verdict["verdicts"]["classical"]["centrosymmetric"] is False
    assert verdict["verdicts"]["centrosymmetric"]["centrosymmetric"] is True
    assert verdict["n_total"] == 36 and verdict["n_half"] == 18
    for name in ("A_classical.mtx", "A_classical.csv", "A_centrosymmetric.mtx", "A_centrosymmetric.csv",
                 "A_centrosymmetric.B.mtx", "A_centrosymmetric.C.mtx"):
        assert (tmp_path / name).exists()


def test_paper_example_dump_interior(tmp_path, capsys):
    code, out, _ = _run(capsys, "paper-example", "--out", str(tmp_path), "--dump-rows", "interior")
    assert code == 0
    rows = [line for line in out.splitlines() if line.startswith("row ")]
    assert len(rows) == 2
    for line in rows:
        coefs = sorted(int(entry.split(":")[1]) for entry in line.split(": ", 1)[1].split(" | ")[0].split())
        assert coefs == [-58, 4, 4, 9, 9, 16, 16]


def test_paper_example_is_byte_identical(tmp_path, capsys):
    _run(capsys, "paper-example", "--out", str(tmp_path / "a"))
    _run(capsys, "paper-example", "--out", str(tmp_path / "b"))
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_check(tmp_path, capsys):
    _run(capsys, "paper-example", "--out", str(tmp_path))
    code, out, _ = _run(capsys, "check", "--matrix", str(tmp_path / "A_centrosymmetric.mtx"))
    assert code == 0 and "centrosymmetric" in out
    code, out, _ = _run(capsys, "check", "--matrix", str(tmp_path / "A_classical.mtx"))
    assert code == 1 and "not centrosymmetric" in out


def test_check_odd_rank(tmp_path, capsys):
    io.write_matrix_market(tmp_path / "odd.mtx", np.eye(3))
    code, _, err = _run(capsys, "check", "--matrix", str(tmp_path / "odd.mtx"))
    assert code == 2 and "even" in err


def test_check_missing_file(tmp_path, capsys):
    code, _, err = _run(capsys, "check", "--matrix", str(tmp_path / "nope.mtx"))
    assert code == 2


def _config(tmp_path, **doc):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.mark.parametrize("solver", ["centro", "dense"])
def test_solve(tmp_path, capsys, monkeypatch, solver):
    monkeypatch.delenv("CENTROMESH_SEED", raising=False)
    cfg = _config(
        tmp_path,
        grid={"nx": 5, "ny": 4, "nz": 6, "hx": 0.25, "hy": "1/3", "hz": 0.2},
        rho={"random": {"low": -1, "high": 1}},
        bc={"z_min": {"type": "dirichlet", "value": {"random": {}}}},
        seed=4,
        output_dir=str(tmp_path / "out"),
    )
    code, out, _ = _run(capsys, "solve", "--config", cfg, "--solver", solver)
    assert code == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["solver"] == solver and report["seed"] == 4 and report["passed"]
    assert report["relative_residual"] <= 1e-10
    assert report["storage"]["dense"] == 2 * report["storage"]["centro"]
    x = io.read_vector(tmp_path / "out" / "solution.txt")
    assert x.shape == (120,)


def test_solvers_agree(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("CENTROMESH_SEED", raising=False)
    cfg = _config(tmp_path, grid={"nx": 4, "ny": 4, "nz": 4}, rho={"random": {}})
    _run(capsys, "solve", "--config", cfg, "--solver", "centro", "--out", str(tmp_path / "c"))
    _run(capsys, "solve", "--config", cfg, "--solver", "dense", "--out", str(tmp_path / "d"))
    xc = io.read_vector(tmp_path / "c" / "solution.txt")
    xd = io.read_vector(tmp_path / "d" / "solution.txt")
    assert np.linalg.norm(xc - xd) <= 1e-10 * np.linalg.norm(xd)


def test_solve_seed_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CENTROMESH_SEED", "9")
    cfg = _config(tmp_path, rho={"random": {}})
    _run(capsys, "solve", "--config", cfg, "--out", str(tmp_path / "o"))
    assert json.loads((tmp_path / "o" / "report.json").read_text())["seed"] == 9


def test_solve_all_neumann_is_numerical_failure(tmp_path, capsys):
    bc = {f: {"type": "neumann"} for f in ("x_min", "x_max", "y_min", "y_max", "z_min", "z_max")}
    cfg = _config(tmp_path, bc=bc, output_dir=str(tmp_path / "o"))
    code, _, err = _run(capsys, "solve", "--config", cfg)
    assert code == 3 and "all-Neumann" in err


def test_solve_config_error(tmp_path, capsys):
    cfg = _config(tmp_path, grid={"nx": 3, "ny": 3, "nz": 3})
    code, _, err = _run(capsys, "solve", "--config", cfg)
    assert code == 2 and "$.grid.nz" in err


def test_centro_solver_needs_centro_numbering(tmp_path, capsys):
    cfg = _config(tmp_path, numbering="classical", output_dir=str(tmp_path / "o"))
    code, _, err = _run(capsys, "solve", "--config", cfg)
    assert code == 2 and "centrosymmetric" in err


def test_solve_residual_failure(tmp_path, capsys):
    cfg = _config(tmp_path, rho=1.0, output_dir=str(tmp_path / "o"))
    code, _, _ = _run(capsys, "solve", "--config", cfg, "--tol", "1e-300")
    assert code == 1


def test_bench(tmp_path, capsys):
    cfg = _config(tmp_path, bench={"sizes": [16, 32], "repeats": 1}, output_dir=str(tmp_path / "b"))
    code, out, _ = _run(capsys, "bench", "--config", cfg)
    assert code == 0
    with open(tmp_path / "b" / "bench.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["n_total"]) for r in rows] == [16, 32]
    assert all(float(r["storage_ratio"]) == 2.0 for r in rows)


def test_mesh_dump_stdout(tmp_path, capsys):
    cfg = _config(tmp_path, grid={"nx": 2, "ny": 1, "nz": 4})
    code, out, _ = _run(capsys, "mesh-dump", "--config", cfg)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "index,i,j,k,x,y,z,mirror_index"
    assert len(lines) == 9
    assert lines[1].split(",")[-1] == "7"


def test_mesh_dump_file(tmp_path, capsys):
    code, _, _ = _run(capsys, "mesh-dump", "--out", str(tmp_path / "m.csv"))
    assert code == 0
    assert len((tmp_path / "m.csv").read_text().splitlines()) == 37


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "centromesh", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "paper-example" in proc.stdout
