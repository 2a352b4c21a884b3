from __future__ import annotations

import json
import subprocess
import sys

import pytest

from loopforge.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    assert code == 0
    return json.loads(out)


def test_propagate_f5_cube(capsys):
    r = run_json(capsys, "propagate", "builtin:F5", "--eq", "cube")
    assert r["result"] == "FAIL"
    assert r["witness"] == ["a"] and r["failure"] == ["b"]
    assert r["guards"]["max_order"] > 0


def test_propagate_text(capsys):
    code, out, _ = run(capsys, "propagate", "F5", "--eq", "cube")
    assert code == 0
    assert out.startswith("FAIL")
    assert "guards:" in out


def test_propagate_k28(capsys):
    assert run_json(capsys, "propagate", "K28", "--eq", "assoc")["result"] == "PASS"
    r = run_json(capsys, "propagate", "K28", "--eq", "assoc", "--quotient-by-center")
    assert r["result"] == "FAIL" and r["order"] == 14


def test_propagate_equation_text(capsys):
    r = run_json(capsys, "propagate", "Z4", "--eq", "x*y = y*x")
    assert r["result"] == "PASS"


def test_propagate_parse_error(capsys):
    code, _, err = run(capsys, "propagate", "Z4", "--eq", "x*y*z = x")
    assert code == 2 and "error" in err


def test_analyze(capsys):
    r = run_json(capsys, "analyze", "builtin:F5")
    assert r["order"] == 5 and not r["associative"] and r["simple"]
    r = run_json(capsys, "analyze", "K28")
    assert r["steiner"] and len(r["center"]) == 2 and not r["simple"]
    r = run_json(capsys, "analyze", "Z4")
    assert r["abelian_group"] and r["exponent"] == 4


def test_analyze_lattice_guard(capsys):
    r = run_json(capsys, "analyze", "K28", "--lattice-limit", "10")
    assert "refused" in r["subloops"]


def test_size_guard_exit(capsys):
    code, _, err = run(capsys, "analyze", "Z100000")
    assert code == 2 and "size guard" in err


def test_steiner_reports(capsys):
    r = run_json(capsys, "steiner", "STS9")
    assert r["anti_pasch"] and r["minimal"] and r["hall"]
    r = run_json(capsys, "steiner", "STS7", "anti-pasch")
    assert not r["anti_pasch"] and r["pasch"]
    r = run_json(capsys, "steiner", "STS13", "anti-pasch")
    assert r["anti_pasch"] is False and len(r["pasch"]) > 0


def test_steiner_orient(capsys):
    r = run_json(capsys, "steiner", "STS9", "orient", "--diag", "1", "--check-cases")
    assert r["assoc_propagates"] and r["exponent"] == 4 and r["case_mismatches"] == 0
    r = run_json(capsys, "steiner", "STS9", "orient", "--diag", "0")
    assert not r["assoc_propagates"] and r["exponent"] == 2
    assert r["diassociativity_counterexample"] is not None


def test_steiner_orient_needs_diag(capsys):
    code, _, err = run(capsys, "steiner", "STS9", "orient")
    assert code == 2 and "--diag" in err


def test_steiner_to_loop(tmp_path, capsys):
    out = tmp_path / "l.txt"
    code, _, _ = run(capsys, "steiner", "STS7", "to-loop", "-o", str(out))
    assert code == 0
    r = run_json(capsys, "analyze", str(out))
    assert r["order"] == 8 and r["abelian_group"]


def test_steiner_file(tmp_path, capsys):
    f = tmp_path / "s.txt"
    f.write_text("7\n0 1 3\n1 2 4\n2 3 5\n3 4 6\n4 5 0\n5 6 1\n6 0 2\n")
    assert run_json(capsys, "steiner", str(f), "validate")["valid"]
    bad = tmp_path / "bad.txt"
    bad.write_text("7\n0 1 3\n")
    code, _, err = run(capsys, "steiner", str(bad))
    assert code == 2 and "not covered" in err


def test_goursat(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("0 0\n1 1\n2 0\n3 1\n")
    r = run_json(capsys, "goursat", "Z4", "Z2", "--subloop", str(f))
    assert r["N1"] == ["0", "2"] and r["N2"] == ["0"]
    f.write_text("0 0\n1 1\n")
    r = run_json(capsys, "goursat", "Z2", "Z2", "--subloop", str(f))
    assert r["N1"] == ["0"] and r["phi"] == [[["0"], ["0"]], [["1"], ["1"]]]
    f.write_text("0 0\n2 0\n")
    code, _, err = run(capsys, "goursat", "Z4", "Z2", "--subloop", str(f))
    assert code == 2 and "factor 1" in err


def test_extend(tmp_path, capsys):
    out = tmp_path / "x.txt"
    assert run(capsys, "extend", "COCYCLE28", "-o", str(out))[0] == 0
    r = run_json(capsys, "analyze", str(out), "--lattice-limit", "1")
    assert r["order"] == 28 and r["steiner"]
    code, text, _ = run(capsys, "extend", "builtin:COCYCLE15")
    assert code == 0 and text.splitlines()[0] == "15"
    assert len([l for l in text.splitlines() if not l.startswith("#")]) == 16


def test_extend_zero_cocycle(tmp_path, capsys):
    f = tmp_path / "c.txt"
    f.write_text("Z2\nZ2\n")
    r = run_json(capsys, "extend", str(f))
    assert r["order"] == 4
    assert r["table"] == [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]


def test_builtin_list_and_emit(capsys):
    r = run_json(capsys, "builtin", "list")
    assert len(r["entries"]) >= 9
    code, out, _ = run(capsys, "builtin", "emit", "STS13")
    assert code == 0 and len(out.splitlines()) == 27
    code, out, _ = run(capsys, "builtin", "emit", "F5")
    assert out.splitlines()[2:] == ["0 1 2 3 4", "1 2 4 0 3", "2 0 3 4 1", "3 4 1 2 0", "4 3 0 1 2"]


def test_builtin_unknown(capsys):
    code, _, err = run(capsys, "builtin", "emit", "NOPE")
    assert code == 2 and "available" in err and "K28" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "analyze", "/nonexistent/file.txt")
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "loopforge", "propagate", "M12", "--eq", "assoc"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("PASS")


def test_argparse_error_exit():
    with pytest.raises(SystemExit) as info:
        main(["nope"])
    assert info.value.code != 0
