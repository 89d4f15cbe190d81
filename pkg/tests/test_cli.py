import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from quatinv.cli import main
from quatinv.qcore import (
    QMatrix,
    fro_norm,
    mat_mul,
    random_qmat,
    read_qmat,
    write_qmat,
)
from quatinv.apps import ColorImage, write_ppm


@pytest.fixture
def rand_mat(tmp_path):
    rng = np.random.default_rng(0)
    a = random_qmat(6, 4, rng)
    path = tmp_path / "A.qmat"
    write_qmat(path, a)
    return a, str(path)


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def test_pinv_end_to_end(rand_mat, tmp_path):
    a, a_path = rand_mat
    out = tmp_path / "X.qmat"
    rpt = tmp_path / "r.json"
    code = main(["pinv", "--in", a_path, "--out", str(out),
                 "--json", str(rpt)])
    assert code == 0
    report = load_json(rpt)
    assert set(report["residuals"]) == {"one", "outer", "p3", "p4"}
    assert all(v <= 1e-9 for v in report["residuals"].values())
    assert report["within_tol"] is True
    x = read_qmat(out)
    assert x.shape == (4, 6)
    # written matrix re-reads bitwise
    again = tmp_path / "X2.qmat"
    write_qmat(again, x)
    assert out.read_bytes() == again.read_bytes()


def test_pinv_frd_crep_realization(rand_mat, tmp_path):
    a, a_path = rand_mat
    rpt = tmp_path / "r.json"
    code = main(["pinv", "--in", a_path, "--method", "frd",
                 "--route", "crep", "--json", str(rpt)])
    assert code == 0
    report = load_json(rpt)
    assert report["method"] == "frd" and report["route"] == "crep"
    assert all(v <= 1e-9 for v in report["residuals"].values())


def test_outer_classification_flags(tmp_path):
    rng = np.random.default_rng(1)
    a = random_qmat(5, 5, rng)
    astar = mat_mul(QMatrix.eye(5), a)  # any invertible generator works here
    paths = {}
    for name, m in [("A", a), ("S", QMatrix.eye(5)), ("T", QMatrix.eye(5))]:
        p = tmp_path / f"{name}.qmat"
        write_qmat(p, m)
        paths[name] = str(p)
    rpt = tmp_path / "r.json"
    code = main(["outer", "--in", paths["A"], "--s", paths["S"],
                 "--t", paths["T"], "--route", "crep", "--json", str(rpt)])
    assert code == 0
    report = load_json(rpt)
    cls = report["classification"]
    assert cls["is_one_inverse"] and cls["is_12_unique"]
    assert report["ranks"]["nu"] == 5


def test_outer_w_existence_failure_exits_1(tmp_path):
    nilp = QMatrix(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
                   np.zeros((2, 2), dtype=complex))
    a_path = tmp_path / "N.qmat"
    w_path = tmp_path / "W.qmat"
    write_qmat(a_path, nilp)
    write_qmat(w_path, QMatrix.eye(2))
    rpt = tmp_path / "diag.json"
    code = main(["outer-w", "--in", str(a_path), "--w", str(w_path),
                 "--json", str(rpt)])
    assert code == 1
    report = load_json(rpt)
    assert report["exists"] is False
    assert "singular" in report["reason"]


def test_drazin_and_group_on_block_example(tmp_path):
    # invertible 1x1 block (+) nilpotent 2x2 Jordan block -> index 2
    q1 = np.diag([2.0, 0.0, 0.0]).astype(complex)
    q1[1, 2] = 1.0
    a = QMatrix(q1, np.zeros((3, 3), complex))
    a_path = tmp_path / "A.qmat"
    write_qmat(a_path, a)
    rpt = tmp_path / "d.json"
    out = tmp_path / "AD.qmat"
    code = main(["drazin", "--in", str(a_path), "--out", str(out),
                 "--json", str(rpt)])
    assert code == 0
    report = load_json(rpt)
    assert report["index"] == 2
    assert all(v <= 1e-10 for v in report["residuals"].values())
    x = read_qmat(out)
    assert abs(x.q1[0, 0] - 0.5) <= 1e-12

    code = main(["group", "--in", str(a_path), "--json", str(rpt)])
    assert code == 1  # index 2 > 1: no group inverse
    assert load_json(rpt)["exists"] is False


def test_group_on_invertible(tmp_path):
    rng = np.random.default_rng(2)
    a = random_qmat(3, 3, rng)
    a_path = tmp_path / "A.qmat"
    write_qmat(a_path, a)
    rpt = tmp_path / "g.json"
    code = main(["group", "--in", str(a_path), "--json", str(rpt)])
    assert code == 0
    assert all(v <= 1e-9 for v in load_json(rpt)["residuals"].values())


def test_rank_frd_svd_smoke(tmp_path):
    rng = np.random.default_rng(3)
    a = mat_mul(random_qmat(6, 3, rng), random_qmat(3, 5, rng))
    a_path = tmp_path / "A.qmat"
    write_qmat(a_path, a)
    rpt = tmp_path / "r.json"

    assert main(["rank", "--in", str(a_path), "--json", str(rpt)]) == 0
    assert load_json(rpt)["rank"] == 3

    prefix = str(tmp_path / "fact")
    assert main(["frd", "--in", str(a_path), "--out", prefix,
                 "--json", str(rpt)]) == 0
    rep = load_json(rpt)
    assert rep["rank"] == 3 and rep["reconstruction_residual"] <= 1e-10
    f = read_qmat(prefix + ".F.qmat")
    g = read_qmat(prefix + ".G.qmat")
    assert fro_norm(mat_mul(f, g) - a) <= 1e-10

    assert main(["svd", "--in", str(a_path), "--route", "crep",
                 "--out", prefix, "--json", str(rpt)]) == 0
    rep = load_json(rpt)
    assert rep["rank"] == 3
    assert len(rep["sigma"]) == 5
    u = read_qmat(prefix + ".U.qmat")
    assert u.shape == (6, 6)


def test_usage_errors_exit_2(tmp_path, capsys):
    assert main([]) == 2
    assert main(["pinv"]) == 2                       # missing --in
    assert main(["nonsense"]) == 2
    missing = str(tmp_path / "missing.qmat")
    assert main(["rank", "--in", missing]) == 2
    bad = tmp_path / "bad.qmat"
    bad.write_text("not a matrix\n")
    assert main(["rank", "--in", str(bad)]) == 2
    capsys.readouterr()


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    capsys.readouterr()


def test_deblur_cli(tmp_path):
    rng = np.random.default_rng(4)
    img = ColorImage(*rng.uniform(0.1, 0.9, size=(3, 16, 16)))
    ppm = tmp_path / "in.ppm"
    write_ppm(ppm, img)
    rpt = tmp_path / "m.json"
    out = tmp_path / "restored.ppm"
    code = main(["deblur", "--image", str(ppm), "--p", "2", "--q", "8",
                 "--sigma", "3", "--r", "3", "--s", "3", "--compare-real",
                 "--out", str(out), "--json", str(rpt)])
    assert code == 0
    report = load_json(rpt)
    assert set(report) == {"psnr_db", "ssim", "rr", "corr_orig", "corr_quat",
                           "corr_real", "params", "seed"}
    assert report["psnr_db"] >= 40.0
    assert report["rr"] <= 1e-6
    assert np.array(report["corr_real"]).shape == (3, 3)
    assert out.exists()


def test_deblur_rejects_height_mismatch(tmp_path, capsys):
    rng = np.random.default_rng(5)
    img = ColorImage(*rng.uniform(0.1, 0.9, size=(3, 12, 12)))
    ppm = tmp_path / "in.ppm"
    write_ppm(ppm, img)
    assert main(["deblur", "--image", str(ppm), "--p", "2", "--q", "8"]) == 2
    err = capsys.readouterr().err
    assert "12" in err and "16" in err


def test_lorenz_filter_cli(tmp_path):
    rpt = tmp_path / "f.json"
    prefix = str(tmp_path / "run")
    code = main(["lorenz-filter", "--T", "4", "--dt", "0.05",
                 "--noise-sigma", "0.01", "--seed", "5",
                 "--out", prefix, "--json", str(rpt)])
    assert code == 0
    report = load_json(rpt)
    assert report["delay_samples"] == 20
    assert report["order"] == 30
    assert report["relative_error"] <= 1e-8
    with open(prefix + ".trajectory.csv") as fh:
        assert fh.readline().strip() == "t,x,y,z"
    with open(prefix + ".filter.csv") as fh:
        assert fh.readline().strip() == "t,dr,dg,db,dhat_r,dhat_g,dhat_b"


def test_same_seed_same_json(tmp_path):
    r1, r2, r3 = (tmp_path / f"{i}.json" for i in range(3))
    base = ["lorenz-filter", "--T", "3", "--dt", "0.1",
            "--noise-sigma", "0.05"]
    main(base + ["--seed", "9", "--json", str(r1)])
    main(base + ["--seed", "9", "--json", str(r2)])
    main(base + ["--seed", "10", "--json", str(r3)])
    assert r1.read_text() == r2.read_text()
    assert r1.read_text() != r3.read_text()


def test_env_seed_fallback(tmp_path, monkeypatch):
    r1, r2 = tmp_path / "a.json", tmp_path / "b.json"
    base = ["lorenz-filter", "--T", "3", "--dt", "0.1",
            "--noise-sigma", "0.05"]
    monkeypatch.setenv("QUATINV_SEED", "11")
    main(base + ["--json", str(r1)])
    monkeypatch.delenv("QUATINV_SEED")
    main(base + ["--seed", "11", "--json", str(r2)])
    assert r1.read_text() == r2.read_text()
    monkeypatch.setenv("QUATINV_SEED", "not-a-number")
    assert main(base + ["--json", str(r1)]) == 2


def test_bench_cli(tmp_path):
    out = tmp_path / "bench.csv"
    rpt = tmp_path / "b.json"
    code = main(["bench", "--suite", "outer_right", "--k", "2,3",
                 "--trials", "2", "--seed", "1",
                 "--out", str(out), "--json", str(rpt)])
    assert code == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:5] == ["op", "route", "k", "trials", "mean_seconds"]
    assert len(rows) == 1 + 2 * 2
    assert load_json(rpt)["rows"] == 4


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "quatinv.cli", "--help"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "quatinv" in proc.stdout
