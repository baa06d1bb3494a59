import json
import subprocess
import sys

import pytest

from continuants.cli import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main


def run(capsys, *argv):
    code = main(list(argv) + ["--quiet"])
    out, err = capsys.readouterr()
    return code, out, err


def test_count_json(capsys):
    code, out, _ = run(capsys, "count", "--a", "2", "--m", "3", "--bound", "3")
    assert code == EXIT_OK
    assert json.loads(out) == {"a": 2, "m": 3, "N": 3, "mode": "sequences", "count": "4", "nodes": 12}


def test_count_text_and_csv(capsys):
    _, out, _ = run(capsys, "count", "--a", "2", "--m", "3", "--bound", "2", "--format", "text")
    assert out == "f(2^3, 2) = 1  [sequences]\n"
    _, out, _ = run(capsys, "count", "--a", "3", "--m", "4", "--N", "4", "--format", "csv")
    assert out.splitlines()[0] == "a,m,N,mode,count,nodes,millis"
    assert out.splitlines()[1].startswith("3,4,4,sequences,10,")


def test_count_list_contains_identity(capsys):
    _, out, _ = run(capsys, "count", "--a", "3", "--m", "4", "--bound", "4", "--list")
    rows = [json.loads(line) for line in out.splitlines()]
    assert {"elements": [2, 2, 1, 1, 1, 1, 2], "continuant": "81"} in rows
    assert len(rows) == 10


def test_count_fractions(capsys):
    _, out, _ = run(capsys, "count", "--a", "2", "--m", "3", "--bound", "3", "--mode", "fractions")
    assert json.loads(out)["count"] == "2"


def test_json_is_byte_stable_across_workers(capsys):
    outs = set()
    for workers in ("1", "1", "3"):
        _, out, _ = run(capsys, "count", "--a", "2", "--m", "12", "--bound", "4", "--list", "--workers", workers)
        outs.add(out)
    assert len(outs) == 1


def test_budget_exit_code(capsys):
    code, out, err = run(capsys, "count", "--a", "3", "--m", "10", "--bound", "4", "--node-budget", "10")
    assert code == EXIT_BUDGET and out == "" and "budget" in err


@pytest.mark.parametrize("argv", [
    ["count", "--a", "2", "--m", "3"],
    ["count", "--a", "0", "--m", "3", "--bound", "3"],
    ["count", "--a", "2", "--m", "1", "--bound", "1"],
    ["count", "--a", "2", "--m", "3", "--bound", "3", "--format", "xml"],
    ["frobnicate"],
    ["witnesses", "--a", "2", "--s", "2", "--m", "5", "--seed-cache", "none"],
    ["verify", "--suite", "theorem9"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_USAGE and out == "" and err


def test_witnesses(capsys, tmp_path):
    cache = tmp_path / "seeds.jsonl"
    code, out, _ = run(capsys, "witnesses", "--a", "2", "--s", "2", "--m", "7", "--seed-cache", str(cache))
    assert code == EXIT_OK
    rows = [json.loads(line) for line in out.splitlines()]
    assert {tuple(r["elements"]) for r in rows} >= {(2, 1, 2, 1, 1, 1, 1, 2)}
    assert all(r["continuant"] == "128" for r in rows)
    assert cache.exists()
    _, again, _ = run(capsys, "witnesses", "--a", "2", "--s", "2", "--m", "7", "--seed-cache", str(cache))
    assert again == out


def test_witnesses_text(capsys):
    _, out, _ = run(capsys, "witnesses", "--a", "2", "--s", "2", "--m", "6", "--seed-cache", "none", "--format", "text")
    assert "2 1 3 1 1 2" in out.splitlines()


def test_roots(capsys):
    code, out, _ = run(capsys, "roots", "--s", "6")
    row = json.loads(out)
    assert code == EXIT_OK and row["polynomial"] == "λ^3 - 6λ^2 - 8λ + 8" and row["char_poly_check"]
    assert 6.9 < row["lambda"] < 7.0
    _, out, _ = run(capsys, "roots", "--s", "2", "--s-max", "8", "--format", "csv")
    assert len(out.splitlines()) == 8


def test_zaremba(capsys):
    _, out, _ = run(capsys, "zaremba", "--d", "81", "--bound", "4")
    assert json.loads(out) == {"d": "81", "N": 4, "c": "31", "elements": [2, 1, 1, 1, 1, 2, 2]}
    _, out, _ = run(capsys, "zaremba", "--d", "6", "--bound", "2", "--format", "text")
    assert out == "none\n"


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "count", "--a", "2", "--m", "3", "--bound", "3", "--output", str(target))
    assert code == EXIT_OK and out == ""
    assert json.loads(target.read_text())["count"] == "4"


@pytest.mark.parametrize("suite", ["statement1", "lemmas", "theorem1", "theorem2", "theorem3", "theorem4", "theorem5"])
def test_verify_passing_suites(capsys, suite):
    code, out, _ = run(capsys, "verify", "--suite", suite, "--seed-cache", "none", "--m-max", "16")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == EXIT_OK and rows and all(r["verdict"] == "holds" for r in rows)


def test_verify_reports_failures(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "theorem6", "--format", "csv")
    assert code == EXIT_VERIFY
    failing = [line for line in out.splitlines() if line.endswith(",fails")]
    assert len(failing) == 1 and "s=4" in failing[0]


def test_progress_goes_to_stderr(capsys):
    code = main(["count", "--a", "2", "--m", "6", "--bound", "4"])
    out, err = capsys.readouterr()
    assert code == EXIT_OK and "visited" in err and "visited" not in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "continuants", "count", "--a", "2", "--m", "3", "--bound", "3",
                           "--format", "text", "--quiet"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "f(2^3, 3) = 4  [sequences]\n"
