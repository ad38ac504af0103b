import json
import subprocess
import sys

import pytest

from arboral.cli import main
from arboral.decomposition import DecompositionTree, validate_tree
from arboral.geometry import read_permutation_file


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_single_element(tmp_path, capsys):
    out = tmp_path / "p.txt"
    code, _, _ = run_cli(capsys, "gen", "-n", "1", "-k", "2", "-s", "0", "--out", str(out))
    assert code == 0
    assert out.read_text() == "1\n"


def test_gen_round_trip(tmp_path, capsys):
    p = tmp_path / "p.txt"
    t = tmp_path / "t.txt"
    code, _, _ = run_cli(
        capsys, "gen", "-n", "5", "-k", "2", "-s", "7", "--out", str(p), "--emit-tree", str(t)
    )
    assert code == 0
    perm = read_permutation_file(p)
    tree = DecompositionTree.parse(t.read_text(), perm)
    assert validate_tree(perm, tree)
    assert tree.max_fanout() <= 2


def test_gen_rejects_k1(capsys):
    code, _, err = run_cli(capsys, "gen", "-n", "5", "-k", "1", "-s", "0")
    assert code == 2
    assert "k must be >= 2" in err


def test_run_fixture(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text("3 1 2 5 4\n")
    code, out, _ = run_cli(capsys, "run", str(p))
    assert code == 0
    rep = json.loads(out)
    assert rep["g_total"] == 6 and rep["mmc"] == 2 and rep["gr"] == 4 and rep["br"] == 0
    assert rep["all_pass"] is True and rep["k_source"] == "inferred"


def test_run_single_access(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text("1\n")
    code, out, _ = run_cli(capsys, "run", str(p))
    assert code == 0
    rep = json.loads(out)
    assert rep["g_total"] == 0 and rep["all_pass"] is True


def test_run_identity_with_inferred_tree(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text(" ".join(str(i) for i in range(1, 101)))
    code, out, _ = run_cli(capsys, "run", str(p))
    rep = json.loads(out)
    assert code == 0 and rep["mmc"] == 0 and rep["g_total"] == 99
    assert rep["k"] == 2 and rep["k_source"] == "inferred"
    assert rep["bounds"]["bound_2nk1"]["rhs"] == 200


def test_run_with_tree_file(tmp_path, capsys):
    p = tmp_path / "p.txt"
    t = tmp_path / "t.txt"
    run_cli(capsys, "gen", "-n", "12", "-k", "3", "-s", "1", "--out", str(p), "--emit-tree", str(t))
    code, out, _ = run_cli(capsys, "run", str(p), "--tree", str(t))
    rep = json.loads(out)
    assert code == 0 and rep["k_source"] == "witness"


def test_run_invalid_input(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("1 1 3\n")
    code, _, err = run_cli(capsys, "run", str(p))
    assert code == 2 and "permutation" in err


def test_experiment_rows_and_determinism(tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    args = ["experiment", "-n", "16", "-k", "2,4", "-s", "0,1,2"]
    assert run_cli(capsys, *args, "--out", str(out1), "--jobs", "1")[0] == 0
    assert run_cli(capsys, *args, "--out", str(out2), "--jobs", "4")[0] == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = out1.read_text().strip().splitlines()
    assert len(lines) == 1 + 6 + 2  # header, data rows, mean rows
    header = lines[0].split(",")
    assert header[:4] == ["seed", "n", "k", "k_source"]
    for ln in lines[1:]:
        assert ln.split(",")[-1] == "1"


def test_experiment_rejects_k1(capsys):
    code, _, err = run_cli(capsys, "experiment", "-n", "8", "-k", "1", "-s", "0")
    assert code == 2 and "k must be >= 2" in err


def test_opt_and_certificate(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text("3 1 2 5 4\n")
    code, out, _ = run_cli(capsys, "opt", str(p))
    assert code == 0
    rep = json.loads(out)
    assert rep["opt_size"] == 5 and rep["x_union_opt"] == 10

    code, out, _ = run_cli(capsys, "certificate", str(p))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("orientation,") and len(lines) == 5

    code, out, _ = run_cli(capsys, "certificate", str(p), "--opt")
    assert code == 0 and len(out.strip().splitlines()) == 5


def test_opt_limit(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text("1 2 3 4 5 6 7\n")
    code, _, err = run_cli(capsys, "opt", str(p))
    assert code == 2 and "limited" in err


def test_verify_quick(capsys):
    code, out, _ = run_cli(capsys, "verify", "--level", "quick", "-s", "0")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "arboral.cli", "gen", "-n", "4", "-k", "2", "-s", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    values = [int(v) for v in proc.stdout.split()]
    assert sorted(values) == [1, 2, 3, 4]
