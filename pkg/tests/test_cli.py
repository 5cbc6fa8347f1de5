"""Command-line behaviour and exit codes."""
import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from support import F1_A, F1_B, F1_C, F1_D, F1_U, F1_V, caterpillar, double_star
from leafselect.cli import main
from leafselect.io import read_instance, write_instance
from leafselect.tree import validate


def run(argv, capsys):
    try:
        code = main([str(a) for a in argv])
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def f1_file(tmp_path):
    path = tmp_path / "f1.json"
    write_instance(path, double_star())
    return path


def test_generate_double_star(tmp_path, capsys):
    out = tmp_path / "g.json"
    code, _, _ = run(["generate", "--n", 4, "--m", 4, "--shape", "balanced",
                      "--nh-growth", 1, "--out", out], capsys)
    assert code == 0
    mt = read_instance(out)
    assert mt.n == 4 and mt.m == 4 and validate(mt).ok


def test_generate_to_stdout(capsys):
    code, out, _ = run(["generate", "--n", 10, "--m", 3, "--seed", 2], capsys)
    assert code == 0 and json.loads(out)["version"] == 1


def test_generate_rejects_more_marked_than_leaves(capsys):
    code, _, err = run(["generate", "--n", 4, "--m", 9], capsys)
    assert code == 2 and "m" in err


def test_generate_select_verify_pipeline(tmp_path, capsys):
    inst, sel = tmp_path / "i.json", tmp_path / "s.json"
    assert run(["generate", "--n", 1000, "--m", 100, "--seed", 7, "--out", inst], capsys)[0] == 0
    assert run(["select", "--in", inst, "--p", "9/10", "--out", sel], capsys)[0] == 0
    doc = json.loads(sel.read_text())
    assert len(doc["selected"]) >= 9
    assert set(doc["outcomes"]) == {"completed", "delimiterHit", "exhausted"}
    code, out, _ = run(["verify", "--in", inst, "--selection", sel], capsys)
    assert code == 0 and json.loads(out)["ok"] is True


def test_select_double_star_with_stats(f1_file, tmp_path, capsys):
    stats = tmp_path / "stats.json"
    code, out, _ = run(["select", "--in", f1_file, "--p", "1/2", "--stats", stats], capsys)
    assert code == 0
    assert len(json.loads(out)["selected"]) >= 1
    assert json.loads(stats.read_text())["p"] == "1/2"


def test_select_refuses_invalid_instance(tmp_path, capsys):
    path = tmp_path / "bad.json"
    write_instance(path, double_star({F1_A: [F1_A, F1_U], F1_B: [F1_B, F1_U], F1_C: [F1_C],
                                      F1_D: [F1_D]}))
    code, out, err = run(["select", "--in", path, "--p", "1/2"], capsys)
    assert code == 1 and out == ""
    kinds = {v["kind"] for v in json.loads(err)["violations"]}
    assert "consecutive-overlap" in kinds


@pytest.mark.parametrize("p", ["0.5", "1/1", "0/3", "x", "1/0"])
def test_select_rejects_bad_p(f1_file, p, capsys):
    assert run(["select", "--in", f1_file, "--p", p], capsys)[0] == 2


def test_missing_or_broken_files(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert run(["select", "--in", tmp_path / "nope.json", "--p", "1/2"], capsys)[0] == 2
    assert run(["select", "--in", broken, "--p", "1/2"], capsys)[0] == 2
    assert run(["render", "--in", broken], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2


def _selection_file(tmp_path, leaves):
    path = tmp_path / "sel.json"
    path.write_text(json.dumps({"selected": leaves}))
    return path


@pytest.mark.parametrize("nh, leaves, code, key", [
    ({F1_A: [F1_A], F1_B: [F1_B], F1_C: [F1_C], F1_D: [F1_D]}, [F1_A, F1_C], 0, None),
    ({F1_A: [F1_A, F1_U], F1_B: [F1_B, F1_U], F1_C: [F1_C], F1_D: [F1_D]}, [F1_A, F1_B], 1,
     "overlaps"),
    ({F1_A: [F1_A, F1_U], F1_B: [F1_B], F1_C: [F1_C, F1_V], F1_D: [F1_D]}, [F1_A, F1_C], 1,
     "bridgingEdges"),
])
def test_verify_exit_codes(tmp_path, capsys, nh, leaves, code, key):
    inst = tmp_path / "i.json"
    write_instance(inst, double_star(nh))
    got, out, _ = run(["verify", "--in", inst, "--selection", _selection_file(tmp_path, leaves)],
                      capsys)
    assert got == code
    if key:
        assert json.loads(out)[key]


def test_verify_non_marked_selection(f1_file, tmp_path, capsys):
    code, out, _ = run(["verify", "--in", f1_file, "--selection",
                        _selection_file(tmp_path, [F1_U])], capsys)
    assert code == 1 and json.loads(out)["ok"] is False


def test_oracle_examples(tmp_path, f1_file, capsys):
    code, out, _ = run(["oracle", "--in", f1_file], capsys)
    assert code == 0 and json.loads(out)["optimum"] == 4 and json.loads(out)["floor"] == 1
    f2 = tmp_path / "f2.json"
    write_instance(f2, caterpillar())
    code, out, _ = run(["oracle", "--in", f2], capsys)
    assert code == 0 and json.loads(out)["optimum"] == 9


def test_oracle_compare(tmp_path, capsys):
    inst = tmp_path / "i.json"
    run(["generate", "--n", 60, "--m", 18, "--seed", 4, "--nh-growth", 3, "--out", inst], capsys)
    code, out, _ = run(["oracle", "--in", inst, "--compare-p", "1/2"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["optimum"] >= 2 and doc["algorithm"] <= doc["optimum"]


def test_oracle_refuses_large_m(tmp_path, capsys):
    inst = tmp_path / "i.json"
    run(["generate", "--n", 60, "--m", 25, "--out", inst], capsys)
    assert run(["oracle", "--in", inst], capsys)[0] == 2


def test_bench_csv(capsys):
    code, out, _ = run(["bench", "--sizes", "2^6..2^7,300", "--p-list", "1/2,9/10",
                        "--seeds", 2], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["n", "m", "p", "steps", "wall_ns", "selected"]
    assert len(rows) == 3 * 2 * 2
    for row in rows:
        num, den = map(int, row["p"].split("/"))
        assert 10 * int(row["selected"]) >= Fraction(num, den) * int(row["m"])


def test_bench_rejects_bad_sizes(capsys):
    assert run(["bench", "--sizes", "1"], capsys)[0] == 2
    assert run(["bench", "--m-ratio", "3/2"], capsys)[0] == 2


def test_render_formats(f1_file, tmp_path, capsys):
    code, out, _ = run(["render", "--in", f1_file], capsys)
    assert code == 0 and out.startswith("graph ")
    svg = tmp_path / "f1.svg"
    sel = _selection_file(tmp_path, [F1_A])
    assert run(["render", "--in", f1_file, "--format", "svg", "--selection", sel,
                "--out", svg], capsys)[0] == 0
    assert svg.read_text().startswith("<svg")
    bad = _selection_file(tmp_path, [F1_U])
    assert run(["render", "--in", f1_file, "--selection", bad], capsys)[0] == 2


def test_console_script_entry_point(f1_file):
    proc = subprocess.run([sys.executable, "-m", "leafselect.cli", "select", "--in",
                           str(f1_file), "--p", "1/2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["selected"]
