from __future__ import annotations

import csv
import io
import subprocess
import sys

import pytest

from fdpc.cli import main, parse_grid


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_construct_base(capsys):
    code, out, _ = run(["construct", "--t", "2", "--s", "1"], capsys)
    assert code == 0 and "n=16 k=9" in out


def test_construct_bad_t_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["construct", "--t", "1"])
    assert exc.value.code == 2


def test_construct_writes_files(tmp_path, capsys):
    prefix = str(tmp_path / "c")
    code, out, err = run(["construct", "--t", "16", "--s", "2", "--seed", "7", "--shorten-w4", "1", "--out", prefix], capsys)
    assert code == 0 and "n=1023 k=898" in out
    assert "perm_seed_1=" in err
    assert (tmp_path / "c.spec").exists() and (tmp_path / "c.mat").exists()


def test_analyze_and_oracle(capsys):
    code, out, _ = run(["analyze", "--t", "16", "--wmax", "6"], capsys)
    rows = {int(r["weight"]): float(r["value"]) for r in csv.DictReader(io.StringIO(out))}
    assert code == 0 and abs(rows[4] - 1.3289) < 1e-4 and rows[6] < 20
    code, out, _ = run(["analyze", "--t", "2", "--mode", "bound", "--wmax", "8"], capsys)
    assert "8,702,upper_bound" in out
    code, out, _ = run(["oracle", "--t", "2"], capsys)
    assert "4,36,exact" in out and "6,96,exact" in out
    code, _, err = run(["oracle", "--t", "4"], capsys)
    assert code == 1 and "exceeds" in err


def test_bound_bec_grid(tmp_path, capsys):
    code, out, err = run(["bound", "--t", "8", "--s", "2", "--channel", "bec", "--grid", "0.10:0.01:0.20"], capsys)
    lines = out.strip().split("\n")
    assert code == 0 and len(lines) == 12 and "wt=20" in err
    vals = [float(l.split(",")[1]) for l in lines[1:]]
    assert vals == sorted(vals)


def test_bound_awgn_monotone(capsys):
    code, out, err = run(["bound", "--t", "16", "--s", "2", "--channel", "awgn", "--grid", "4:0.5:6"], capsys)
    vals = [float(l.split(",")[1]) for l in out.strip().split("\n")[1:]]
    assert code == 0 and vals == sorted(vals, reverse=True) and "wt=30" in err


def test_bound_gamma_diagnostic(capsys):
    code, _, err = run(["bound", "--t", "8", "--s", "2", "--channel", "bec", "--grid", "0.1", "--alpha4", "0"], capsys)
    assert code == 1 and "gamma" in err


def test_simulate(tmp_path, capsys):
    out_file = tmp_path / "sim.csv"
    args = ["simulate", "--t", "8", "--s", "2", "--channel", "bec", "--grid", "0.2", "--trials", "300",
            "--out", str(out_file)]
    code, _, err = run(args, capsys)
    assert code == 0 and "seed=1" in err and "max_list=1024" in err
    first = out_file.read_text()
    run(args, capsys)
    strip = lambda text: [l.rsplit(",", 1)[0] for l in text.strip().split("\n")]
    assert strip(first) == strip(out_file.read_text())


def test_simulate_usage_errors(capsys):
    for bad in (["--trials", "0"], ["--trials", "10", "--max-list", "3"]):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "--t", "3", "--s", "2", "--channel", "bec", "--grid", "0.2"] + bad)
        assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--channel", "bec", "--grid", "0.2", "--trials", "5"])
    assert exc.value.code == 2


def test_parse_grid():
    assert parse_grid("0.10:0.01:0.20")[-1] == 0.2 and len(parse_grid("0.10:0.01:0.20")) == 11
    assert parse_grid("1,2.5") == (1.0, 2.5)


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "fdpc.cli", "construct", "--t", "2"], capture_output=True, text=True)
    assert res.returncode == 0 and "k=9" in res.stdout
