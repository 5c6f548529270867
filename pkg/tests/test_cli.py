import csv
import io
import subprocess
import sys
from decimal import Decimal

import numpy as np
import pytest

from zetascope.cli import LEDGER_COLUMNS, main
from zetascope.primes import load_table
from zetascope.stats import gue_density


@pytest.fixture
def cache(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("ZETASCOPE_CACHE", str(d))
    return d


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


# -- usage ------------------------------------------------------------------------

@pytest.mark.parametrize("argv", [
    ["zero", "--n", "0"],
    ["zero", "--n", "abc"],
    ["frobnicate"],
    [],
    ["kac", "--primes", "1000", "--t", "-5", "--samples", "1000"],
    ["paircorr", "--count", "2000"],
    ["rn", "--sigma", "1.5", "--tmin", "10", "--tmax", "20"],
    ["tilde", "--from", "1", "--count", "3", "--digits", "99"],
])
def test_usage_errors_exit_two(capsys, cache, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert "usage" in err or "error" in err


def test_missing_zero_file_exits_two(capsys, cache, tmp_path):
    code, _, err = run(capsys, "deltastats", "--zeros-file", str(tmp_path / "none.txt"))
    assert code == 2
    assert "none.txt" in err


def test_computation_error_exits_one(capsys, cache):
    code, out, err = run(capsys, "zero", "--n", "99999", "--primes", "1000")
    assert code == 1
    assert "DomainError" in err


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "zetascope", "tilde", "--from", "1", "--count", "2"],
                          capture_output=True, text=True, env={"ZETASCOPE_CACHE": str(tmp_path)})
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "n,tilde_t"


# -- subcommands ---------------------------------------------------------------------

def test_tilde(capsys, cache):
    code, out, _ = run(capsys, "tilde", "--from", "1", "--count", "2", "--digits", "2")
    assert code == 0
    assert rows(out) == [["n", "tilde_t"], ["1", "14.52"], ["2", "20.66"]]


def test_primes_writes_cache(capsys, cache):
    code, out, _ = run(capsys, "primes", "--count", "1000")
    assert code == 0
    r = rows(out)
    assert r[0] == ["index", "prime"] and r[1] == ["1", "2"] and r[-1] == ["1000", "7919"]
    table = load_table(cache / "primes_1000.bin")
    assert table.primes.tolist() == [int(x[1]) for x in r[1:]]


def test_corrupted_cache_header_is_replaced(tmp_path):
    (tmp_path / "primes_10.bin").write_bytes(b"ZPRIMES v7 10\n" + bytes(80))
    proc = subprocess.run([sys.executable, "-m", "zetascope", "primes", "--count", "10"],
                          capture_output=True, text=True, env={"ZETASCOPE_CACHE": str(tmp_path)})
    assert proc.returncode == 0
    assert rows(proc.stdout)[-1] == ["10", "29"]
    assert "version" in proc.stderr
    assert load_table(tmp_path / "primes_10.bin").primes[-1] == 29


def test_smooth(capsys, cache):
    code, out, _ = run(capsys, "smooth", "--gens", "2", "--limit", "12")
    assert code == 0
    assert [r[0] for r in rows(out)] == ["n", "1", "2", "3", "4", "6", "8", "9", "12"]


def test_paircorr_model_grid(capsys, cache, tmp_path):
    out_path = tmp_path / "pc.csv"
    code, _, _ = run(capsys, "paircorr", "--model", "--count", "100000", "--sigma", "0.274", "--seed", "7",
                     "--out", str(out_path))
    assert code == 0
    r = rows(out_path.read_text())
    assert r[0] == ["u", "empirical", "gue"]
    assert len(r) == 61
    u = np.array([float(x[0]) for x in r[1:]])
    np.testing.assert_allclose(u, 0.025 + 0.05 * np.arange(60), atol=1e-12)
    np.testing.assert_allclose([float(x[2]) for x in r[1:]], gue_density(u), atol=1e-15)


def test_paircorr_from_file(capsys, cache, tmp_path, true_zeros):
    path = tmp_path / "z.txt"
    path.write_text("\n".join(repr(float(x)) for x in true_zeros.ordinates[:3000]) + "\n")
    code, out, _ = run(capsys, "paircorr", "--zeros-file", str(path))
    assert code == 0
    assert len(rows(out)) == 61


def test_deltastats(capsys, cache, true_zeros):
    code, out, _ = run(capsys, "deltastats", "--zeros-file", true_zeros.source, "--summary")
    assert code == 0
    header, row = rows(out)
    s = dict(zip(header, row))
    assert int(s["count"]) == 10 ** 5
    assert abs(float(s["stddev"]) - 0.274) < 0.02
    code, out, _ = run(capsys, "deltastats", "--zeros-file", true_zeros.source)
    hist = rows(out)
    assert len(hist) == 61
    assert sum(int(x[3]) for x in hist[1:]) == 10 ** 5


def test_kac(capsys, cache):
    code, out, _ = run(capsys, "kac", "--primes", "2000", "--t", "1e6", "--samples", "2000", "--seed", "3")
    assert code == 0
    header, row = rows(out)
    s = dict(zip(header, row))
    assert abs(float(s["variance"]) - 0.5) < 0.07


def test_rn(capsys, cache):
    code, out, _ = run(capsys, "rn", "--sigma", "0.75", "--tmin", "10", "--tmax", "12")
    assert code == 0
    r = rows(out)
    assert r[0] == ["t", "n_primes", "abs_direct", "abs_estimate"]
    assert [x[1] for x in r[1:]] == ["100", "121", "144"]


def test_argscan(capsys, cache):
    code, out, _ = run(capsys, "argscan", "--tmin", "30", "--tmax", "30.2", "--delta", "0.01",
                       "--primes", "10000")
    assert code == 0
    r = rows(out)
    assert len(r) == 4
    # N follows the [t^2] cap point by point
    assert [x[1] for x in r[1:]] == ["900", "906", "912"]
    code, out, _ = run(capsys, "argscan", "--tmin", "30", "--tmax", "30", "--delta", "0.01",
                       "--primes", "10000", "--no-cap")
    assert rows(out)[1][1] == "10000"


# -- reproducibility and the results ledger ---------------------------------------------

@pytest.mark.parametrize("argv", [
    ["paircorr", "--model", "--count", "5000", "--seed", "11"],
    ["kac", "--primes", "1000", "--t", "1e5", "--samples", "1000", "--seed", "2"],
    ["tilde", "--from", "10^30", "--count", "3"],
])
def test_reruns_are_byte_identical(capsys, cache, tmp_path, argv):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *argv, "--out", str(a))[0] == 0
    assert run(capsys, *argv, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_zero_appends_ledger_row(capsys, cache):
    argv = ["zero", "--n", "1e30", "--primes", "20000", "--delta", "1e-6", "--digits", "6"]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    header, row = rows(out)
    assert header == ["n", "t", "n_primes", "delta", "predicted_error", "residual", "iterations"]
    assert row[0] == str(10 ** 30) and row[2] == "20000"
    assert len(row[1].split(".")[1]) == 6
    ledger = rows((cache / "results.csv").read_text())
    assert ledger[0] == LEDGER_COLUMNS
    entry = dict(zip(LEDGER_COLUMNS, ledger[1]))
    assert entry["n"] == str(10 ** 30)
    assert entry["t"] == row[1]
    assert entry["n_primes"] == "20000" and float(entry["delta"]) == 1e-6
    assert int(entry["working_digits"]) >= 31 + 12
    assert float(entry["seconds"]) >= 0
    run(capsys, *argv)
    assert len(rows((cache / "results.csv").read_text())) == 3


def test_scan_rows_increase(capsys, cache):
    code, out, _ = run(capsys, "scan", "--from", "1e25", "--count", "3", "--primes", "20000")
    assert code == 0
    t = [Decimal(x[1]) for x in rows(out)[1:]]
    assert t[0] < t[1] < t[2]
