import pytest

from app.core.errors import ArgumentError, MissingInputError
from app.models.ideals import IdealKind
from app.models.sets import FiniteSet
from app.services.registry import (
    parse_counterexample_params,
    parse_floats,
    parse_ideal,
    parse_list,
    parse_matrix,
    parse_permutation,
    parse_sequence,
    parse_set,
    parse_weight,
)


def test_parse_sets():
    assert parse_set("evens").members(6).tolist() == [2, 4, 6]
    assert parse_set("ap:3,1").members(10).tolist() == [1, 4, 7, 10]
    assert parse_set("finite:5,2").members(10).tolist() == [2, 5]
    assert parse_set("range:3,4").members(10).tolist() == [3, 4]
    assert parse_set("complement:evens").members(6).tolist() == [1, 3, 5]
    assert parse_set("union:finite:1|range:5,6").members(10).tolist() == [1, 5, 6]
    assert parse_set("R:2").members(10).tolist() == [1, 2, 3]


def test_set_file_spec(tmp_path):
    path = tmp_path / "set.txt"
    path.write_text("2\n3\n", encoding="utf-8")
    assert isinstance(parse_set(f"file:{path}"), FiniteSet)
    with pytest.raises(MissingInputError):
        parse_set(f"file:{tmp_path / 'missing.txt'}")


@pytest.mark.parametrize("spec", ["primes", "ap:0,1", "range:5,2", "finite:0", "R:0", "ap:1"])
def test_bad_set_specs(spec):
    with pytest.raises(ArgumentError):
        parse_set(spec)


def test_parse_sequences():
    assert parse_sequence("affine:2,-1,indicator:squares").values_at([1, 2]).tolist() == [1.0, -1.0]
    assert parse_sequence("mul:evens,const:3").prefix(4).tolist() == [0.0, 0.0, 3.0, 0.0, 3.0]
    assert parse_sequence("abs:alt").prefix(2).tolist() == [0.0, 1.0, 1.0]
    with pytest.raises(ArgumentError):
        parse_sequence("const:x")


def test_parse_ideals_and_weights():
    assert parse_ideal("z").kind == IdealKind.ASYMPTOTIC_ZERO
    assert parse_ideal("zg:nlog").kind == IdealKind.SIMPLE_DENSITY
    assert parse_weight("n2").values(3).tolist()[1:] == [1.0, 4.0, 9.0]
    with pytest.raises(ArgumentError):
        parse_ideal("zg:unknown")


def test_counterexample_params():
    params = parse_counterexample_params("squares:5")
    assert params.max_block == 5
    assert params.i_set.label == "squares"
    assert parse_counterexample_params("squares:5", max_block=3).max_block == 3
    assert parse_counterexample_params("evens").max_block == 10


def test_parse_matrix_labels():
    assert parse_matrix("counterexample-b:squares:4").label == "counterexample-b:squares:4"
    assert parse_matrix("perm:pair-swap").row(2)[0].tolist() == [1]
    assert parse_permutation("block-swap").forward(4) == 8
    with pytest.raises(ArgumentError):
        parse_matrix("hilbert")


def test_parse_lists():
    family = parse_list("squares;finite:1,2", parse_set)
    assert [S.label for S in family] == ["squares", "finite:1,2"]
    assert parse_list(None, parse_set) == []
    assert parse_floats("0.5, 0.1") == [0.5, 0.1]
    with pytest.raises(ArgumentError):
        parse_floats("0.5,x")
