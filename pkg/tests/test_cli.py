import json
import logging

import pytest

from app.main import main


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)


def run_command(tmp_path, *argv):
    output = tmp_path / "report.json"
    code = main(list(argv) + ["--output", str(output)])
    payload = json.loads(output.read_text()) if output.exists() else None
    return code, payload


def test_density_of_evens_is_violated(tmp_path):
    code, payload = run_command(tmp_path, "density", "--set", "evens", "--ideal", "z", "--max-n", "10000")
    assert code == 1
    assert payload["verdict"]["status"] == "Violated"
    assert payload["config"]["maxN"] == 10000
    assert payload["config"]["params"]["set"] == "evens"


def test_squares_are_in_z(tmp_path):
    code, payload = run_command(tmp_path, "density", "--set", "squares", "--ideal", "z", "--max-n", "100000")
    assert code == 0
    assert payload["verdict"]["status"] == "Satisfied"


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["density"],
        ["density", "--set", "evens", "--max-n", "many"],
        ["density", "--set", "primes"],
        ["density", "--set", "evens", "--windows", "1,2"],
        ["permute", "--perm", "identity", "--test", "sigma-hat"],
    ],
)
def test_usage_errors(argv):
    assert main(argv) == 64


def test_missing_input_file(tmp_path):
    assert main(["density", "--set", f"file:{tmp_path / 'missing.txt'}", "--output", str(tmp_path / "r.json")]) == 66


def test_bad_input_file(tmp_path):
    path = tmp_path / "set.txt"
    path.write_text("3\n2\n", encoding="utf-8")
    assert main(["density", "--set", f"file:{path}", "--output", str(tmp_path / "r.json")]) == 65


def test_construct_prints_to_stdout(capsys):
    code = main(["construct", "--counterexample", "A", "--max-block", "4", "--output", "-"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdict"]["status"] == "Satisfied"
    assert payload["config"]["params"]["counterexample"] == "A"


def test_construct_export(tmp_path):
    export = tmp_path / "a.jsonl"
    code, _ = run_command(
        tmp_path, "construct", "--counterexample", "A", "--max-block", "3", "--export", str(export)
    )
    assert code == 0
    assert len(export.read_text().splitlines()) == 10


def test_limit_proposes_a_candidate(tmp_path):
    code, payload = run_command(tmp_path, "limit", "--sequence", "indicator:squares", "--max-n", "100000")
    assert code == 0
    assert payload["result"]["proposed"] is True


def test_limit_without_candidate_is_inconclusive(tmp_path):
    code, payload = run_command(tmp_path, "limit", "--sequence", "alt", "--max-n", "10000")
    assert code == 2
    assert payload["result"]["candidate"] is None


def test_permute_p3(tmp_path):
    code, _ = run_command(
        tmp_path, "permute", "--perm", "squares-evens", "--test", "p3", "--set", "squares", "--max-n", "100000"
    )
    assert code == 1


def test_permute_sigma_hat(tmp_path):
    code, payload = run_command(tmp_path, "permute", "--perm", "squares-evens", "--test", "sigma-hat", "--n", "8")
    assert code == 0
    assert payload["result"]["sigmaHat"] == 0.5
    assert payload["verdict"] is None


def test_suite_subset(tmp_path):
    code, payload = run_command(tmp_path, "suite", "--only", "wlln-oracle-decay")
    assert code == 0
    assert payload["result"]["report"]["passed"] == 1


def test_checkpoint_csv(tmp_path):
    csv_path = tmp_path / "checkpoints.csv"
    code, _ = run_command(
        tmp_path, "density", "--set", "evens", "--max-n", "1000", "--csv", str(csv_path)
    )
    assert code == 1
    lines = csv_path.read_text().splitlines()
    assert lines[1] == "n,ratio"
    assert lines[-1] == "1000,0.5"


def test_reports_do_not_depend_on_threads(tmp_path):
    output = tmp_path / "suite.json"
    argv = ["suite", "--only", "cesaro-S1,squares-in-z,levy-pair-swap", "--output", str(output)]
    assert main(argv + ["--threads", "1"]) == 0
    first = output.read_bytes()
    assert main(argv + ["--threads", "4"]) == 0
    assert output.read_bytes() == first


def test_check_several_conditions(tmp_path):
    code, payload = run_command(tmp_path, "check", "--matrix", "cesaro", "--cond", "S1,S2,S3", "--max-n", "100000")
    assert code == 0
    assert sorted(payload["result"]["reports"]) == ["S1", "S2", "S3"]


def test_check_rejects_unknown_conditions():
    assert main(["check", "--matrix", "cesaro", "--cond", "S1,T9"]) == 64
    assert main(["check", "--matrix", "cesaro", "--cond", "T3"]) == 64


def test_witness_command(tmp_path):
    code, payload = run_command(tmp_path, "witness", "--matrix", "pick-nth", "--iset", "squares", "--steps", "20")
    assert code == 0
    assert payload["result"]["trace"]["status"] == "complete"
