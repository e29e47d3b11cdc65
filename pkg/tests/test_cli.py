import json
import subprocess
import sys

import pytest

from chimera_ising.cli import main
from chimera_ising.formats import format_spins, read_instance


def run(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_solve_verify(tmp_path, capsys):
    inst = tmp_path / "a.ising"
    assert run(["gen", "--family", "rfr", "--k", 2, "--seed", 7, "--out", inst], capsys)[0] == 0
    code, out, _ = run(["solve", "--exact", inst, "--spins-out", tmp_path / "s.txt"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["status"] == "optimal" and rep["energy_num"] == rep["lower_bound_num"]
    (tmp_path / "r.json").write_text(out)
    code, out, _ = run(["verify", inst, "--spins", tmp_path / "s.txt"], capsys)
    assert code == 0 and json.loads(out)["energy_num"] == rep["energy_num"]
    code, out, _ = run(["verify", inst, "--report", tmp_path / "r.json"], capsys)
    assert code == 0 and json.loads(out)["match"]


def test_verify_detects_false_claim(tmp_path, capsys):
    inst = tmp_path / "a.ising"
    run(["gen", "--family", "mgw", "--k", 1, "--seed", 1, "--out", inst], capsys)
    _, out, _ = run(["solve", "--brute", inst], capsys)
    rep = json.loads(out)
    rep["energy_num"] -= 10
    rep["lower_bound_num"] -= 10
    (tmp_path / "r.json").write_text(json.dumps(rep))
    code, _, err = run(["verify", inst, "--report", tmp_path / "r.json"], capsys)
    assert code == 2 and "differs" in err


def test_selby_options_and_trace(tmp_path, capsys):
    inst = tmp_path / "a.ising"
    run(["gen", "--family", "rfr", "--k", 2, "--seed", 3, "--out", inst], capsys)
    code, out, _ = run(["solve", "--selby", inst, "--w", 1, "--seeds", "4711..4713",
                        "--time-limit", 5, "--max-passes", 2, "--restart", "fresh",
                        "--perturb-frac", 0.5, "--trace", tmp_path / "t.json"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["runs"] == 3 and rep["meta"]["seeds"] == [4711, 4712, 4713]
    assert json.loads((tmp_path / "t.json").read_text())["trace"][0]["pass"] == 0


def test_bench_csv(tmp_path, capsys):
    d = tmp_path / "inst"
    d.mkdir()
    for s in (1, 2):
        run(["gen", "--family", "rfr", "--k", 2, "--seed", s, "--out", d / f"r{s}.ising"], capsys)
    code, out, _ = run(["bench", "--dir", d, "--solvers", "dp,selby", "--time", 30,
                        "--max-passes", 1, "--seeds", "1..2", "--json-out", tmp_path / "rec.jsonl"],
                       capsys)
    assert code == 0
    header, row = out.splitlines()
    assert header.split(",")[:9] == ["family", "instances", "nodes_min", "nodes_max", "nodes_avg",
                                     "edges_min", "edges_max", "edges_avg", "opt_known"]
    assert row.startswith("rfr,2,")
    code, again, _ = run(["bench", "--records", tmp_path / "rec.jsonl", "--solvers", "dp,selby"],
                         capsys)
    assert again == out
    code, js, _ = run(["bench", "--records", tmp_path / "rec.jsonl", "--format", "json"], capsys)
    assert len(js.splitlines()) == 2


def test_identical_runs_identical_outputs(tmp_path, capsys):
    for tag in ("x", "y"):
        run(["gen", "--family", "mis", "--k", 3, "--seed", 5, "--out", tmp_path / f"{tag}.ising"],
            capsys)
    assert (tmp_path / "x.ising").read_bytes() == (tmp_path / "y.ising").read_bytes()


@pytest.mark.parametrize("args", [
    [],
    ["solve"],
    ["gen", "--family", "nope", "--k", 2],
    ["gen", "--family", "rfr"],
    ["solve", "--exact", "--brute", "x"],
    ["solve", "x", "--seeds", "9..1"],
    ["bench", "--dir", ".", "--solvers", "cplex"],
    ["verify", "x"],
    ["gen", "--family", "lga"],
])
def test_usage_errors_exit_1(args, capsys, tmp_path):
    (tmp_path / "x").write_text("ising 1 0 10\n")
    args = [str(tmp_path / "x") if a == "x" else a for a in args]
    code, _, err = run(args, capsys)
    assert code == 1 and err


def test_io_and_format_errors_exit_2(tmp_path, capsys):
    code, _, err = run(["solve", tmp_path / "missing.ising"], capsys)
    assert code == 2
    bad = tmp_path / "bad.ising"
    bad.write_text("ising 2 1 10\nJ 0 1 zz\n")
    code, _, err = run(["solve", bad], capsys)
    assert code == 2 and "bad.ising:2" in err


def test_solver_failure_exit_2(tmp_path, capsys):
    inst = tmp_path / "a.ising"
    run(["gen", "--family", "rfr", "--k", 4, "--seed", 1, "--out", inst], capsys)
    code, _, err = run(["solve", inst, "--width-cap", 8], capsys)
    assert code == 2 and "width" in err


def test_k64_rejection_exit_3(capsys):
    code, out, err = run(["gen", "--family", "k64-ising", "--k", 16, "--p", 0.3, "--seed", 1], capsys)
    assert code == 3 and out == "" and err.startswith("rejected")


def test_k64_defaults_to_c16(tmp_path, capsys):
    out = tmp_path / "p.ising"
    code, _, _ = run(["gen", "--family", "k64-ising", "--p", 0.2, "--seed", 1, "--attempts", 20,
                      "--out", out], capsys)
    assert code == 0 and read_instance(out).n == 2048


def test_k64_maxcut_and_embed(tmp_path, capsys):
    phys, logical = tmp_path / "p.ising", tmp_path / "l.ising"
    code, _, err = run(["gen", "--family", "k64-maxcut", "--k", 4, "--p", 0.5, "--seed", 2,
                        "--out", phys, "--logical-out", logical], capsys)
    assert code == 0 and "chain offset" in err
    code, out, _ = run(["embed", logical, "--k", 4], capsys)
    assert out == phys.read_text()
    run(["embed", "--k", 4, "--dump", tmp_path / "e.txt"], capsys)
    code, out, _ = run(["embed", logical, "--k", 4, "--embedding", tmp_path / "e.txt"], capsys)
    assert out == phys.read_text()
    _, rep, _ = run(["solve", phys], capsys)
    (tmp_path / "s.txt").write_text(format_spins(json.loads(rep)["spins"]))
    code, out, _ = run(["embed", "--k", 4, "--decode", tmp_path / "s.txt"], capsys)
    assert code == 0 and len(out.split()) == 16


def test_lga_gen(tmp_path, capsys):
    raw = tmp_path / "g.txt"
    raw.write_text("ising-real 2 1\nh 1 0.5\nJ 0 1 2.0\n")
    code, out, _ = run(["gen", "--family", "lga", "--input", raw], capsys)
    assert code == 0 and "family lga" in out


def test_module_entry_point(tmp_path):
    out = tmp_path / "a.ising"
    res = subprocess.run([sys.executable, "-m", "chimera_ising", "gen", "--family", "selby",
                          "--k", "1", "--seed", "2", "--out", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert read_instance(out).family == "selby"
