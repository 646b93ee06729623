import json

import pytest

from app.core.errors import InputFileError, MissingInputError, RangeError
from app.models.schemas import ExperimentConfig, ExperimentReport, Verdict
from app.services.construction_service import build_counterexample_A
from app.services.registry import parse_counterexample_params
from app.utils.file_formats import (
    collect_estimates,
    export_matrix,
    read_matrix_file,
    read_permutation_file,
    read_sequence_file,
    read_set_file,
    read_weight_table,
    write_checkpoints_csv,
    write_report,
)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_set_file_skips_comments(tmp_path):
    path = write(tmp_path, "set.txt", "# squares\n1\n\n4\n9\n")
    S = read_set_file(path)
    assert S.members(100).tolist() == [1, 4, 9]


def test_set_file_must_increase(tmp_path):
    with pytest.raises(InputFileError):
        read_set_file(write(tmp_path, "set.txt", "1\n4\n4\n"))
    with pytest.raises(InputFileError):
        read_set_file(write(tmp_path, "set.txt", "0\n"))
    with pytest.raises(InputFileError):
        read_set_file(write(tmp_path, "set.txt", "one\n"))


def test_missing_file(tmp_path):
    with pytest.raises(MissingInputError):
        read_set_file(str(tmp_path / "nothing.txt"))


def test_weight_table(tmp_path):
    weight = read_weight_table(write(tmp_path, "g.txt", "1 1.0\n2 2.5\n3 4\n"))
    assert weight.values(3).tolist()[1:] == [1.0, 2.5, 4.0]
    with pytest.raises(RangeError):
        weight.values(4)


def test_indexed_files_need_consecutive_indices(tmp_path):
    with pytest.raises(InputFileError):
        read_weight_table(write(tmp_path, "g.txt", "1 1.0\n3 2.0\n"))
    with pytest.raises(InputFileError):
        read_sequence_file(write(tmp_path, "x.txt", "# nothing\n"))
    with pytest.raises(InputFileError):
        read_sequence_file(write(tmp_path, "x.txt", "1 nan\n"))


def test_sequence_file(tmp_path):
    x = read_sequence_file(write(tmp_path, "x.txt", "1 -1\n2 0.5\n"))
    assert x.prefix(2).tolist() == [0.0, -1.0, 0.5]


def test_permutation_file(tmp_path):
    sigma = read_permutation_file(write(tmp_path, "p.txt", "1 2\n2 3\n3 1\n"))
    assert sigma.forward(3) == 1
    assert sigma.inverse(2) == 1
    with pytest.raises(InputFileError):
        read_permutation_file(write(tmp_path, "p.txt", "1 2\n2 2\n"))


def test_matrix_file(tmp_path):
    lines = [
        json.dumps({"row": 1, "entries": [[1, 0.5], [3, 0.5]]}),
        "# skipped",
        json.dumps({"row": 4, "entries": [[2, 1.0]]}),
    ]
    A = read_matrix_file(write(tmp_path, "a.jsonl", "\n".join(lines) + "\n"))
    cols, vals = A.row(1)
    assert cols.tolist() == [1, 3]
    assert vals.tolist() == [0.5, 0.5]
    assert len(A.row(2)[0]) == 0
    assert A.row(4)[0].tolist() == [2]


@pytest.mark.parametrize(
    "text",
    [
        '{"row": 2, "entries": []}\n{"row": 1, "entries": []}\n',
        '{"row": 1, "entries": [[3, 1.0], [2, 1.0]]}\n',
        '{"row": 1, "entries": [[0, 1.0]]}\n',
        '{"row": 1}\n',
        "not json\n",
    ],
)
def test_bad_matrix_files(tmp_path, text):
    with pytest.raises(InputFileError):
        read_matrix_file(write(tmp_path, "bad.jsonl", text))


def test_export_and_read_back(tmp_path):
    params = parse_counterexample_params("squares:3")
    A = build_counterexample_A(params)
    path = str(tmp_path / "export" / "a.jsonl")
    assert export_matrix(A, params.last_row(), path) == 10

    B = read_matrix_file(path)
    cols, vals = B.row(6)
    assert cols.tolist() == [4, 9, 16]
    assert vals == pytest.approx([-1 / 3, -1 / 3, -1 / 3])
    assert B.row(2)[1].tolist() == [-1.0]
    assert B.row(3)[1].tolist() == [1.0]
    assert len(B.row(4)[0]) == 0


def test_reports_are_deterministic(tmp_path):
    report = ExperimentReport(
        config=ExperimentConfig(command="density", max_n=1000, params={"set": "evens"}),
        result={"value": 0.5, "label": "evens"},
        verdict=Verdict.satisfied("test"),
    )
    first = tmp_path / "first.json"
    second = tmp_path / "second.json"
    write_report(report, str(first))
    write_report(report, str(second))
    assert first.read_bytes() == second.read_bytes()
    payload = json.loads(first.read_text())
    assert payload["config"]["maxN"] == 1000
    assert payload["verdict"]["status"] == "Satisfied"
    assert first.read_text().endswith("}\n")


def test_checkpoint_csv(tmp_path):
    payload = {"estimate": {"label": "evens", "checkpoints": [[1, 0.0], [2, 0.5]]}, "other": [1, 2]}
    estimates = collect_estimates(payload)
    assert estimates == [("evens", [[1, 0.0], [2, 0.5]])]
    path = write_checkpoints_csv(estimates, str(tmp_path / "out.csv"))
    with open(path, encoding="utf-8") as handle:
        assert handle.read() == "# evens\nn,ratio\n1,0.0\n2,0.5\n"
