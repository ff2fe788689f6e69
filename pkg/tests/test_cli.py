import csv
import subprocess
import sys

import pytest

from wlsat.cli import EXIT_DISTINGUISHED, EXIT_ERROR, EXIT_INDISTINGUISHABLE, main
from wlsat.cnf import CnfFormula, read_dimacs, read_metadata, write_dimacs

from conftest import XOR_CHAIN, XOR_CHAIN_BROKEN


def write(path, f):
    path.write_bytes(write_dimacs(f))
    return str(path)


def test_generate_cfi(tmp_path, capsys):
    out = tmp_path / "cfi"
    assert main(["generate", "cfi", "--base", "k4", "--out", str(out)]) == 0
    plain, twisted = read_dimacs(out / "cfi_k4.cnf"), read_dimacs(out / "cfi_k4_twisted.cnf")
    assert plain.num_vars == 12 and plain.num_clauses == 28 and twisted.num_clauses == 28
    assert read_metadata((out / "cfi_k4.meta").read_text())["expected"] == "SAT"
    assert read_metadata((out / "cfi_k4_twisted.meta").read_text())["expected"] == "UNSAT"
    assert (out / "config.txt").exists() and (out / "run.log").exists()
    assert "cfi_k4.cnf" in capsys.readouterr().out


def test_generate_random3sat_and_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["generate", "random3sat", "--n", "250", "--seed", "7", "--out", str(out)]) == 0
    name = "random3sat_n250_s7.cnf"
    f = read_dimacs(a / name)
    assert f.num_vars == 250 and f.num_clauses == 1065
    assert (a / name).read_bytes() == (b / name).read_bytes()
    assert read_metadata((a / "random3sat_n250_s7.meta").read_text())["seed"] == "7"


@pytest.mark.parametrize("args, stem", [
    (["tseitin", "--base", "c4", "--charges", "1,0,0,1"], "tseitin_c4_0"),
    (["regular3", "--n", "6"], "regular3_n6_s0"),
    (["lig-extract", "--literals", "20"], "lig_n20_s0"),
    (["graph-encode", "--base", "petersen"], "encode_petersen"),
])
def test_generate_other_families(tmp_path, args, stem):
    assert main(["generate", *args, "--out", str(tmp_path)]) == 0
    assert read_dimacs(tmp_path / f"{stem}.cnf").num_vars > 0


def test_generate_bad_charges(tmp_path, capsys):
    assert main(["generate", "tseitin", "--base", "c4", "--charges", "1,0", "--out", str(tmp_path)]) == EXIT_ERROR
    assert "need 4 charges" in capsys.readouterr().err


def test_wl_exit_codes(tmp_path, capsys):
    a = write(tmp_path / "a.cnf", XOR_CHAIN)
    b = write(tmp_path / "b.cnf", XOR_CHAIN_BROKEN)
    c = write(tmp_path / "c.cnf", CnfFormula(3, ((1, 2, 3),)))
    assert main(["wl", a, b]) == EXIT_INDISTINGUISHABLE
    assert main(["wl", a, c]) == EXIT_DISTINGUISHED
    assert main(["wl", a, str(tmp_path / "missing.cnf")]) == EXIT_ERROR
    capsys.readouterr()
    assert main(["wl", a, b, "--k", "2"]) == EXIT_INDISTINGUISHABLE
    assert main(["wl", a, b, "--k", "3"]) == EXIT_DISTINGUISHED
    assert main(["wl", a, b, "--k", "3", "--tuple-budget", "100"]) == EXIT_ERROR
    assert "budget" in capsys.readouterr().err


def test_wl_trace(tmp_path, capsys):
    a = write(tmp_path / "a.cnf", CnfFormula(1, ((1,),)))
    main(["wl", a, a, "--trace"])
    err = capsys.readouterr().err
    assert err.startswith("round 0: 2 classes") and "converged at round 1" in err


def test_rcrit_batch(tmp_path, capsys):
    inputs = tmp_path / "in"
    inputs.mkdir()
    write(inputs / "unit.cnf", CnfFormula(1, ((1,),)))
    write(inputs / "xor.cnf", XOR_CHAIN)
    write(inputs / "broken.cnf", XOR_CHAIN_BROKEN)
    (inputs / "unit.meta").write_text("family=toy\ndifficulty=easy\n")
    (inputs / "junk.cnf").write_text("p cnf 1 1\n5 0\n")
    out = tmp_path / "run"
    assert main(["rcrit", str(inputs / "*.cnf"), "--out", str(out)]) == 0
    with open(out / "report.csv") as fh:
        rows = {r["instance"]: r for r in csv.DictReader(fh)}
    assert set(rows) == {"unit", "xor", "broken"}
    assert rows["unit"]["r_crit"] == "1" and rows["unit"]["family"] == "toy"
    assert rows["xor"]["status"] == "wl_insufficient"
    assert rows["broken"]["status"] == "precheck_unsat"
    assert "skipped" in capsys.readouterr().err
    assert (out / "aggregate.csv").read_text().startswith("family,difficulty,r_crit")


def test_rcrit_binary_with_workers(tmp_path):
    write(tmp_path / "unit.cnf", CnfFormula(1, ((1,),)))
    write(tmp_path / "xor.cnf", XOR_CHAIN)
    out = tmp_path / "run"
    assert main(["rcrit", str(tmp_path / "*.cnf"), "--strategy", "binary", "--workers", "2", "--out", str(out)]) == 0
    with open(out / "report.csv") as fh:
        assert [r["status"] for r in csv.DictReader(fh)] == ["solved", "wl_insufficient"]


def test_export_graph(tmp_path, capsys):
    src = write(tmp_path / "x.cnf", XOR_CHAIN)
    assert main(["export-graph", src, "lcn"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "p satgraph x 12 15"
    assert sum(1 for l in lines if l.startswith("e ")) == 15
    assert main(["export-graph", src, "lig", "--out", str(tmp_path / "g")]) == 0
    assert (tmp_path / "g" / "x.lig.edges").read_text().startswith("p satgraph x 6 6")


def test_config_file_and_flag_override(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("seed=3\nparam.n=20\n")
    out = tmp_path / "o"
    assert main(["generate", "random3sat", "--config", str(conf), "--out", str(out)]) == 0
    assert (out / "random3sat_n20_s3.cnf").exists()
    assert main(["generate", "random3sat", "--config", str(conf), "--seed", "4", "--out", str(out)]) == 0
    assert (out / "random3sat_n20_s4.cnf").exists()
    dumped = read_metadata((out / "config.txt").read_text())
    assert dumped["seed"] == "4" and dumped["param.n"] == "20"
    conf.write_text("colour=blue\n")
    assert main(["generate", "random3sat", "--config", str(conf), "--out", str(out)]) == EXIT_ERROR


def test_console_script_entry_point(tmp_path):
    a = write(tmp_path / "a.cnf", XOR_CHAIN)
    b = write(tmp_path / "b.cnf", XOR_CHAIN_BROKEN)
    proc = subprocess.run([sys.executable, "-m", "wlsat.cli", "wl", a, b], capture_output=True, text=True)
    assert proc.returncode == EXIT_INDISTINGUISHABLE
    assert proc.stdout.startswith("indistinguishable")
