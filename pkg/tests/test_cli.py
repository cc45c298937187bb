import json
import subprocess
import sys

from localsat.cli import main
from localsat.csp import ternary_example, save_instance


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate_encode_solve(tmp_path, capsys):
    inst = tmp_path / "c.json"
    cnf = tmp_path / "c.cnf"
    assert run(capsys, "generate", "--w", "2", "--d", "2", "--out", str(inst))[0] == 0
    code, out, _ = run(capsys, "encode", "--instance", str(inst), "--encoding", "direct", "--out", str(cnf))
    assert code == 0 and "49 clauses" in out
    stats = tmp_path / "s.json"
    code, out, _ = run(capsys, "solve", "--cnf", str(cnf), "--scheme", "decision", "--seed", "3", "--stats-json", str(stats))
    lines = out.splitlines()
    assert lines[0] == "UNSAT" and lines[1].startswith("restarts=")
    assert json.loads(stats.read_text())["status"] == "UNSAT"


def test_closure_and_nhr(tmp_path, capsys):
    inst = tmp_path / "c.json"
    cnf = tmp_path / "c.cnf"
    trace = tmp_path / "t.txt"
    run(capsys, "generate", "--w", "1", "--d", "2", "--out", str(inst))
    code, out, _ = run(capsys, "closure", "--instance", str(inst), "--k", "1", "--trace", str(trace))
    assert out.strip() == "EMPTY" and trace.read_text().startswith("REMOVE")
    run(capsys, "encode", "--instance", str(inst), "--out", str(cnf))
    code, out, _ = run(capsys, "nhr", "--cnf", str(cnf), "--width", "1", "--trace", str(trace))
    assert out.startswith("REFUTED width=1 steps=")
    assert trace.read_text().startswith("STEP 1: nucleus=")


def test_nhr_saturates_on_satisfiable(tmp_path, capsys):
    inst = tmp_path / "e.json"
    cnf = tmp_path / "e.cnf"
    save_instance(ternary_example(), inst)
    run(capsys, "encode", "--instance", str(inst), "--out", str(cnf))
    code, out, _ = run(capsys, "nhr", "--cnf", str(cnf), "--width", "2")
    assert out.startswith("SATURATED clauses=")
    code, out, _ = run(capsys, "closure", "--instance", str(inst), "--k", "2")
    assert out.strip() == "NONEMPTY"


def test_support_on_ternary_fails(tmp_path, capsys):
    inst = tmp_path / "e.json"
    save_instance(ternary_example(), inst)
    code, _, err = run(capsys, "encode", "--instance", str(inst), "--encoding", "support", "--out", str(tmp_path / "x"))
    assert code != 0 and "binary" in err


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--n", "4", "--d", "2", "--k", "2", "--m", "5")
    assert "< 30" in out and "< 480" in out


def test_absorb(tmp_path, capsys):
    cnf = tmp_path / "a.cnf"
    cnf.write_text("p cnf 2 2\n-1 2 0\n-2 0\n")
    code, out, _ = run(capsys, "absorb", "--cnf", str(cnf), "--clause", "-1")
    assert "overall: absorbed (operational)" in out


def test_bench(tmp_path, capsys):
    csv = tmp_path / "r.csv"
    plot = tmp_path / "p.dat"
    code, out, _ = run(capsys, "bench", "--w", "2", "--d", "2-3", "--scheme", "decision", "--seeds", "2", "--csv", str(csv), "--plotdata", str(plot))
    assert code == 0
    assert len(csv.read_text().splitlines()) == 5
    assert plot.read_text().startswith("# w=2 scheme=decision")
    first = csv.read_text()
    run(capsys, "bench", "--w", "2", "--d", "2-3", "--scheme", "decision", "--seeds", "2", "--csv", str(csv))
    assert csv.read_text() == first


def test_bad_dimacs_reports_error(tmp_path, capsys):
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 1 1\n2 0\n")
    code, _, err = run(capsys, "solve", "--cnf", str(bad))
    assert code == 2 and "line 2" in err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "localsat", "bounds", "--n", "3", "--d", "2", "--k", "1", "--m", "1"], capture_output=True, text=True)
    assert out.returncode == 0 and "n=3" in out.stdout
