import json
import subprocess
import sys

import pytest

from choosability.cli import main
from choosability.instance import ListAssignment, loads, make_instance
from choosability.oracle import find_coloring
from choosability.pipeline import replay, validate_coloring


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def write(tmp_path, obj, name="inst.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


@pytest.mark.parametrize("family,extra,parts", [
    ("small-m", ["--m", "2"], [2, 2]),
    ("large-m", ["--j", "2"], [3, 3]),
    ("sharpness", ["--i", "1"], [1, 3]),
])
def test_gen(capsys, family, extra, parts):
    code, out = run(capsys, "gen", "--family", family, "--k", "2", *extra)
    assert code == 0
    inst, lists = loads(out.out)
    assert list(inst.part_sizes) == parts
    assert find_coloring(inst, lists) is None


def test_gen_eoos_json_lines(capsys):
    code, out = run(capsys, "gen", "--family", "eoos", "--k", "2")
    assert code == 0
    assert [json.loads(line)["parts"] for line in out.out.splitlines()] == [[2, 4], [2, 5], [3, 3]]


def test_gen_to_file(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["gen", "--family", "small-m", "--k", "3", "--m", "3", "-o", str(out)]) == 0
    inst, _ = loads(out.read_text())
    assert inst.part_sizes == (3, 3, 3)


def test_solve_with_trace(tmp_path, capsys):
    lists = [[10, 20, 30], [10, 20, 40], [30, 40, 50], [50, 60, 70]] * 2
    path = write(tmp_path, {"parts": [4, 4], "lists": lists})
    trace_path = tmp_path / "trace.json"
    code, out = run(capsys, "solve", path, "--trace", str(trace_path))
    assert code == 0
    res = json.loads(out.out)
    inst, la = make_instance([4, 4]), ListAssignment.of(lists)
    assert res["valid"] and validate_coloring(inst, la, res["coloring"])
    assert res["stage"] == "merge"
    trace = json.loads(trace_path.read_text())
    dense = replay(trace, inst.n)
    assert [trace["labels"][c] for c in dense] == res["coloring"]
    assert set(trace["properties"]) == {f"P{i}" for i in range(1, 9)}


def test_solve_exact_uncolorable(tmp_path, capsys):
    path = write(tmp_path, {"parts": [1, 1], "lists": [[0], [0]]})
    code, out = run(capsys, "solve", path, "--exact")
    assert code == 1 and json.loads(out.out)["coloring"] is None


def test_solve_precondition_exit_code(tmp_path, capsys):
    path = write(tmp_path, {"parts": [3, 3], "lists": [[0, 1]] * 6})
    code, out = run(capsys, "solve", path)
    assert code == 2 and "error" in out.err


def test_solve_needs_lists(tmp_path, capsys):
    code, _ = run(capsys, "solve", write(tmp_path, {"parts": [2]}))
    assert code == 2


def test_malformed_file(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{")
    code, out = run(capsys, "choice-number", str(p))
    assert code == 2


def test_choice_number(tmp_path, capsys):
    code, out = run(capsys, "choice-number", write(tmp_path, {"parts": [3, 3]}))
    res = json.loads(out.out)
    assert code == 0 and res["choice_number"] == 3 and res["bound"] == 3
    inst, w = loads(json.dumps(res["witness"]))
    assert all(len(l) == 2 for l in w) and find_coloring(inst, w) is None


def test_choosable_and_inconclusive(tmp_path, capsys):
    path = write(tmp_path, {"parts": [2, 4]})
    code, out = run(capsys, "choosable", path, "--k", "2")
    res = json.loads(out.out)
    assert code == 0 and res["choosable"] is False and "witness" in res
    code, out = run(capsys, "choosable", path, "--k", "3", "--node-limit", "3")
    assert code == 3 and "inconclusive" in out.err


def test_verify_writes_reports(tmp_path, capsys):
    rep, table = tmp_path / "r.json", tmp_path / "r.csv"
    code, out = run(capsys, "verify", "nrw", "--n-max", "5", "--report", str(rep), "--csv", str(table))
    assert code == 0
    assert json.loads(out.out)["violations"] == 0
    assert json.loads(rep.read_text())["campaign"] == "nrw"
    assert table.read_text().startswith("parts,")


def test_verify_failing_campaign_exit_code(capsys):
    code, _ = run(capsys, "verify", "main-bound", "--n-max", "6", "--node-limit", "5")
    assert code == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "choosability", "gen", "--family", "eoos", "--k", "3"],
                         capture_output=True, text=True, check=True)
    assert len(res.stdout.splitlines()) == 2
