import io
import json

import pytest

from mtcheck import suites
from mtcheck.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, ReplayFile, main
from mtcheck.core import Property
from mtcheck.gen import ChoiceLog, int_in_range


def run_cli(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def test_correct_suite_passes():
    code, out = run_cli("run", "--suite", "bst-correct", "--seed", "42")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines and all(line.startswith("PASS ") and "(100 tests)" in line for line in lines)


def test_fault_suite_exits_one_and_prints_replay():
    code, out = run_cli("run", "--suite", "bst-fault1", "--seed", "42")
    assert code == EXIT_FAIL
    fail_lines = [line for line in out.splitlines() if line.startswith("FAIL ")]
    assert any("fault1/joint" in line for line in fail_lines)
    assert all("minimal:" in line and "replay: mtreplay-v1|" in line for line in fail_lines)


def test_boundary_suite_minimal_77():
    code, out = run_cli("run", "--suite", "boundary", "--seed", "7")
    assert code == EXIT_FAIL
    assert "minimal: 77 " in out


def test_json_is_byte_identical():
    args = ("run", "--suite", "bst-fault2", "--seed", "9", "--json")
    first = run_cli(*args)
    second = run_cli(*args)
    assert first == second
    reports = json.loads(first[1])
    assert {r["status"] for r in reports} <= {"passed", "failed", "gave_up"}
    assert all(isinstance(r["seed"], int) for r in reports)


def test_parallel_matches_sequential():
    base = ("run", "--suite", "compiler", "--seed", "3", "--json")
    assert run_cli(*base) == run_cli(*base, "--parallel")


def test_save_and_replay_round_trip(tmp_path):
    path = tmp_path / "case.txt"
    code, _ = run_cli("run", "--suite", "compiler-fault", "--seed", "42", "--save-replay", str(path))
    assert code == EXIT_FAIL
    record = ReplayFile.decode(path.read_text())
    assert record.suite == "compiler-fault"
    code, out = run_cli("replay", str(path))
    assert code == EXIT_FAIL
    assert out.startswith(f"FAIL {record.property_name} (replayed)")
    # the run --replay spelling does the same thing
    assert run_cli("run", "--replay", str(path)) == (code, out)


def test_replay_json(tmp_path):
    path = tmp_path / "case.txt"
    run_cli("run", "--suite", "boundary", "--save-replay", str(path))
    code, out = run_cli("replay", str(path), "--json")
    assert code == EXIT_FAIL
    assert json.loads(out) == {"property": "lt-77", "verdict": "fail", "case": "77", "message": json.loads(out)["message"]}


def test_replay_passing_case_exits_zero(tmp_path):
    path = tmp_path / "case.txt"
    path.write_text(ReplayFile(0, "boundary", "lt-77", ChoiceLog.of([(5, 201)])).encode())
    assert run_cli("replay", str(path))[0] == EXIT_OK


def test_no_replay_file_written_on_success(tmp_path):
    path = tmp_path / "case.txt"
    run_cli("run", "--suite", "reverse", "--save-replay", str(path))
    assert not path.exists()


@pytest.mark.parametrize(
    "text",
    [
        "",
        "garbage",
        "mtreplay-v1|42|boundary|lt-77",
        "mtreplay-v0|42|boundary|lt-77|v1:1:5,201",
        "mtreplay-v1|-1|boundary|lt-77|v1:1:5,201",
        "mtreplay-v1|42|boundary|lt-77|v1:2:5,201",
        "mtreplay-v1|42|boundary|lt-77|v1:1:300,201",
        "mtreplay-v1|42|nope|lt-77|v1:1:5,201",
        "mtreplay-v1|42|boundary|missing|v1:1:5,201",
    ],
)
def test_malformed_replay_files(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    assert run_cli("replay", str(path))[0] == EXIT_USAGE


def test_truncated_replay_is_usage_error(tmp_path):
    path = tmp_path / "short.txt"
    path.write_text(ReplayFile(0, "boundary", "lt-77", ChoiceLog()).encode())
    assert run_cli("replay", str(path))[0] == EXIT_USAGE


def test_missing_replay_file(tmp_path):
    assert run_cli("replay", str(tmp_path / "absent.txt"))[0] == EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["run"],
        ["run", "--suite", "no-such-suite"],
        ["run", "--suite", "bst", "--tests", "0"],
        ["run", "--suite", "bst", "--seed", "-1"],
        ["run", "--suite", "bst", "--seed", str(2**64)],
        ["run", "--suite", "bst", "--max-discard-ratio", "0"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv):
    assert run_cli(*argv)[0] == EXIT_USAGE


def test_list():
    code, out = run_cli("list")
    assert code == EXIT_OK
    assert "bst-correct" in out and "  correct/joint" in out and "compiler-fault" in out


def test_gave_up_exits_one(monkeypatch):
    never = Property("never-valid", int_in_range(0, 9), lambda x: True, valid=lambda x: False)
    monkeypatch.setitem(suites.SUITES, "never", lambda params: [never])
    code, out = run_cli("run", "--suite", "never", "--tests", "10")
    assert code == EXIT_FAIL
    assert out.startswith("GAVE UP never-valid (0 tests, ")
