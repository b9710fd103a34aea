import csv
import re
import subprocess
import sys

import numpy as np
import pytest

from rlra import core, fileio, matgen
from rlra.cli import CSV_HEADER, main


def parse_summary(out):
    # summaries are the last line printed; earlier "wrote ..." lines and any
    # bare tokens are not key=value pairs
    line = out.strip().splitlines()[-1]
    return dict(kv.split("=", 1) for kv in line.split() if "=" in kv)


def gen_file(tmp_path, kind="fast", m=120, n=100, seed=1):
    path = str(tmp_path / f"{kind}.rlm")
    assert main(["gen", "--type", kind, "--m", str(m), "--n", str(n),
                 "--seed", str(seed), "--out", path]) == 0
    return path


def write_rank_r_image(path, m, n, r, seed):
    # indicator @ integer palette: integer pixels and bitwise-duplicated rows,
    # so the pixel matrix has exact rank r
    rng = np.random.default_rng(seed)
    picker = np.zeros((m, r))
    picker[np.arange(m), rng.integers(0, r, m)] = 1.0
    palette = rng.integers(0, 256, size=(r, n)).astype(np.float64)
    pixels = picker @ palette
    fileio.write_pgm(path, pixels, maxval=255)
    return pixels


def test_gen_decay_writes_matrix_and_sidecar(tmp_path, capsys):
    path = gen_file(tmp_path, "fast", 50, 40, seed=7)
    out = capsys.readouterr().out
    assert "50x40" in out
    a, sigma = matgen.gen_decay("fast", 50, 40, seed=7)
    assert np.array_equal(fileio.read_rlra(path), a)
    sidecar = path[: -len(".rlm")] + ".sigma"
    assert np.array_equal(fileio.read_sigma(sidecar), sigma)


def test_gen_sparse_writes_matrix_market(tmp_path, capsys):
    path = str(tmp_path / "s.mtx")
    assert main(["gen", "--type", "sparse", "--m", "40", "--n", "30",
                 "--density", "0.05", "--seed", "2", "--out", path]) == 0
    assert "nnz=" in capsys.readouterr().out
    assert fileio.read_mm(path).shape == (40, 30)


def test_factor_powerlu_summary(tmp_path, capsys):
    path = gen_file(tmp_path)
    prefix = str(tmp_path / "f")
    rc = main(["factor", "--in", path, "--alg", "powerlu", "--rank", "20",
               "--passes", "3", "--seed", "4", "--out-prefix", prefix])
    assert rc == 0
    info = parse_summary(capsys.readouterr().out.strip())
    assert info["alg"] == "powerlu"
    assert (info["m"], info["n"], info["k"]) == ("120", "100", "20")
    assert info["v"] == "3"
    assert info["passes"] == "3"
    # the rank-20 optimum on this spectrum is already ~6e-2
    assert float(info["rel_err"]) < 1e-1
    assert fileio.read_rlra(prefix + ".L.rlm").shape == (120, 20)
    assert fileio.read_rlra(prefix + ".U.rlm").shape == (20, 100)
    assert np.loadtxt(prefix + ".rowperm.txt").shape == (120,)
    assert np.loadtxt(prefix + ".colperm.txt").shape == (100,)


def test_factor_powerlu_exact_rank(tmp_path, capsys):
    # integer-valued exact-rank-5 input: the factorization is exact
    rng = np.random.default_rng(0)
    picker = np.zeros((60, 5))
    picker[np.arange(60), rng.integers(0, 5, 60)] = 1.0
    a = picker @ rng.integers(1, 9, size=(5, 40)).astype(np.float64)
    path = str(tmp_path / "r5.rlm")
    fileio.write_rlra(path, a)
    rc = main(["factor", "--in", path, "--alg", "powerlu", "--rank", "5",
               "--passes", "3", "--oversample", "0"])
    assert rc == 0
    info = parse_summary(capsys.readouterr().out.strip())
    assert float(info["rel_err"]) <= 1e-8


def test_factor_randlu_power_flag(tmp_path, capsys):
    path = gen_file(tmp_path)
    rc = main(["factor", "--in", path, "--alg", "randlu", "--rank", "15",
               "--power", "1"])
    assert rc == 0
    info = parse_summary(capsys.readouterr().out.strip())
    assert info["v"] == "4" and info["p"] == "1"
    assert info["passes"] == "4"


def test_factor_randsvd_writes_svd_files(tmp_path, capsys):
    path = gen_file(tmp_path)
    prefix = str(tmp_path / "svd")
    rc = main(["factor", "--in", path, "--alg", "randsvd", "--rank", "15",
               "--power", "1", "--out-prefix", prefix])
    assert rc == 0
    assert fileio.read_rlra(prefix + ".U.rlm").shape == (120, 25)
    assert fileio.read_sigma(prefix + ".S.sigma").shape == (25,)
    assert fileio.read_rlra(prefix + ".V.rlm").shape == (100, 25)


def test_factor_singlepass_reports_columns(tmp_path, capsys):
    path = gen_file(tmp_path)
    rc = main(["factor", "--in", path, "--alg", "singlepass", "--rank", "20"])
    assert rc == 0
    info = parse_summary(capsys.readouterr().out.strip())
    assert info["columns"] == "100"
    assert float(info["rel_err"]) < 1.0


@pytest.mark.parametrize("extra", [
    ["--passes", "3", "--power", "1"],   # both budgets
    ["--passes", "3"],                   # odd budget for an exponent algorithm
])
def test_factor_usage_errors_exit_2(tmp_path, extra):
    path = gen_file(tmp_path)
    with pytest.raises(SystemExit) as exc:
        main(["factor", "--in", path, "--alg", "randlu", "--rank", "10"] + extra)
    assert exc.value.code == 2


def test_factor_singlepass_rejects_budget(tmp_path):
    path = gen_file(tmp_path)
    with pytest.raises(SystemExit) as exc:
        main(["factor", "--in", path, "--alg", "singlepass", "--rank", "10",
              "--passes", "2"])
    assert exc.value.code == 2


def test_factor_missing_file_exit_1(tmp_path, capsys):
    rc = main(["factor", "--in", str(tmp_path / "nope.rlm"), "--alg", "randlu",
               "--rank", "5"])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_adapt_reports_rank_and_convergence(tmp_path, capsys):
    path = gen_file(tmp_path, "fast", 300, 300, seed=3)
    rc = main(["adapt", "--in", path, "--tol", "1e-4", "--block", "10",
               "--l", "150", "--passes", "4"])
    assert rc == 0
    info = parse_summary(capsys.readouterr().out.strip())
    assert 65 <= int(info["rank"]) <= 70
    assert info["converged"] == "true"
    assert info["passes"] == "4"
    assert float(info["rel_err"]) <= 1e-4


def test_adapt_no_restart_exit_3(tmp_path, capsys):
    path = gen_file(tmp_path, "slow", 150, 150, seed=4)
    rc = main(["adapt", "--in", path, "--tol", "1e-7", "--block", "10",
               "--l", "20", "--passes", "4", "--no-restart"])
    assert rc == 3
    assert "error:" in capsys.readouterr().err


def test_adapt_restart_widens_until_unsatisfiable(tmp_path, capsys):
    # width cap floors 85 to a block multiple (80), so five directions stay
    # out of reach and the restart schedule must give up
    path = gen_file(tmp_path, "slow", 85, 85, seed=5)
    rc = main(["adapt", "--in", path, "--tol", "1e-5", "--block", "10",
               "--l", "20", "--passes", "4"])
    assert rc == 4
    assert "error:" in capsys.readouterr().err


def test_compress_recovers_exact_rank_image(tmp_path, capsys):
    src = str(tmp_path / "in.pgm")
    pixels = write_rank_r_image(src, 120, 90, 20, seed=6)
    dst = str(tmp_path / "out.pgm")
    rc = main(["compress", "--in", src, "--out", dst, "--tol", "1e-6",
               "--block", "5"])
    assert rc == 0
    info = parse_summary(capsys.readouterr().out.strip())
    assert 20 <= int(info["rank"]) <= 21
    assert float(info["rel_err"]) <= 1e-6
    assert 0.0 < float(info["size_ratio"]) < 1.0
    back, _ = fileio.read_pgm(dst)
    assert np.array_equal(back, pixels)


def test_compress_moderate_tolerance(tmp_path, capsys):
    src = str(tmp_path / "in.pgm")
    rng = np.random.default_rng(8)
    smooth = np.add.outer(np.linspace(0, 120, 60), np.linspace(0, 120, 80))
    fileio.write_pgm(src, smooth + rng.integers(0, 8, (60, 80)), maxval=255)
    rc = main(["compress", "--in", src, "--out", str(tmp_path / "o.pgm"),
               "--tol", "0.1", "--block", "5"])
    assert rc == 0
    info = parse_summary(capsys.readouterr().out.strip())
    assert float(info["rel_err"]) <= 0.1


def test_bench_passes_suite_csv(tmp_path, capsys):
    out = str(tmp_path / "passes.csv")
    assert main(["bench", "--suite", "passes", "--out", out]) == 0
    with open(out, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(csv.DictReader(open(out, newline="")))
    assert header == CSV_HEADER
    powerlu = {r["v"]: r["passes"] for r in rows if r["alg"] == "powerlu"}
    assert powerlu == {"2": "2", "3": "3", "4": "4", "5": "5"}
    for r in rows:
        if r["alg"] in ("randlu", "randsvd"):
            assert int(r["passes"]) == 2 * int(r["p"]) + 2
    single = [r for r in rows if r["alg"] == "singlepass"]
    assert len(single) == 1 and "columns=200" in single[0]["wall_ms"]


def test_bench_accuracy_suite_csv(tmp_path):
    out = str(tmp_path / "acc.csv")
    assert main(["bench", "--suite", "accuracy", "--type", "fast", "--n", "60",
                 "--seeds", "2", "--out", out]) == 0
    rows = list(csv.DictReader(open(out, newline="")))
    # widths 20, 40, 60 -> one tsvd row plus 3 algs x 2 seeds each
    assert len(rows) == 3 * (1 + 6)
    algs = {r["alg"] for r in rows}
    assert algs == {"tsvd", "powerlu", "randlu", "randsvd"}
    for r in rows:
        assert float(r["rel_err"]) >= 0.0
        if r["alg"] != "tsvd" and r["wall_ms"]:
            float(r["wall_ms"])  # timing stays informational but parseable


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "rlra.cli", "gen", "--type", "fast", "--m", "30",
         "--n", "20", "--out", str(tmp_path / "m.rlm")],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert re.search(r"wrote .*m\.rlm", out.stdout)
    assert fileio.read_rlra_header(str(tmp_path / "m.rlm")) == (30, 20)
