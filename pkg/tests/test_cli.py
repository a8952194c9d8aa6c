import json
import subprocess
import sys

import pytest

from subcurv.cli import main
from subcurv.gallery import export_text


def test_verify_json(tmp_path):
    out = tmp_path / "out.json"
    code = main(["verify", "--example", "hopf", "--points", "5", "--seed", "7",
                 "--format", "json", "-o", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["suite"]["seed"] == 7 and "hopf" in rep["examples"]


def test_verify_unknown_example(capsys):
    assert main(["verify", "--example", "nonexistent"]) == 2
    assert "nonexistent" in capsys.readouterr().err


def test_verify_product_strict_tolerance(capsys):
    assert main(["verify", "--example", "product_s2_s1", "--points", "5",
                 "--tolerance", "1e-12"]) == 0
    assert "PASSED" in capsys.readouterr().out


def test_verify_both_fail_exits_1(capsys):
    # at a tolerance below roundoff, generic residuals cannot pass
    assert main(["verify", "--example", "kaluza_klein_generic", "--points", "2",
                 "--families", "oneill", "--tolerance", "1e-30"]) == 1


def test_verify_bad_flags():
    assert main(["verify", "--example", "hopf", "--families", "bogus"]) == 2
    assert main(["verify", "--example", "hopf", "--points", "0"]) == 2


def test_verify_unwritable_output():
    assert main(["verify", "--example", "hopf", "--points", "1", "--families", "scalar",
                 "-o", "/proc/nope/out.txt"]) == 2


def test_export_then_validate(tmp_path, capsys):
    path = tmp_path / "hopf.sub"
    assert main(["export-example", "hopf", str(path)]) == 0
    assert path.read_text() == export_text("hopf")
    assert main(["validate", str(path)]) == 0
    out = capsys.readouterr().out
    assert "S1" in out and "S2" in out and "FAIL" not in out


def test_export_errors(tmp_path):
    assert main(["export-example", "nope", str(tmp_path / "x")]) == 2
    assert main(["export-example", "hopf", "/proc/nope/x.sub"]) == 2


def test_validate_rank_drop(tmp_path, capsys):
    path = tmp_path / "bad.sub"
    path.write_text(export_text("hopf").replace("pi = (theta, phi)", "pi = (theta, theta)"))
    assert main(["validate", str(path)]) == 1
    assert any(line.startswith("S1") and "FAIL" in line
               for line in capsys.readouterr().out.splitlines())


def test_validate_parse_error(tmp_path, capsys):
    path = tmp_path / "mal.sub"
    path.write_text(export_text("hopf").replace("0.25*cos(theta)", "0.25*cos(theta +)", 1))
    assert main(["validate", str(path)]) == 2
    err = capsys.readouterr().err
    assert "line 7, column" in err


def test_validate_missing_file():
    assert main(["validate", "/nonexistent.sub"]) == 2


def test_verify_file_and_example_path(tmp_path, capsys):
    path = tmp_path / "w.sub"
    path.write_text(export_text("warped_interval_s1"))
    assert main(["verify", "--file", str(path), "--points", "2", "--format", "csv"]) == 0
    assert main(["verify", "--example", str(path), "--points", "2", "--format", "text"]) == 0


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "subcurv.cli", "verify", "--example", "flat_torus_quotient",
                          "--points", "2", "--families", "scalar"], capture_output=True, text=True)
    assert res.returncode == 0 and "PASSED" in res.stdout
