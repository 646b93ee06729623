"""
Parsers for the textual object specs used on the command line and in suites.

    sets         empty | all | evens | odds | squares | cubes | factorial-blocks
                 | ap:<step>,<offset> | finite:<a>,<b>,... | range:<lo>,<hi>
                 | complement:<set> | union:<set>|<set> | R:<maxBlock> | file:<path>
    weights      n | n2 | nlog | piecewise[:<set>] | table:<path>
    ideals       fin | z | zg:<weight> | uniform
    sequences    const:<v> | indicator:<set> | affine:<a>,<b>,<seq> | alt | alt-harmonic
                 | abs:<seq> | mul:<set>,<seq> | sqdiag | file:<path>
    matrices     cesaro | identity | diag:<seq> | perm:<perm> | pick-nth[:<set>]
                 | split-pair[:<set>] | counterexample-a:<set>[:<maxBlock>]
                 | counterexample-b:<set>[:<maxBlock>] | file:<path>
    permutations identity | pair-swap | block-swap | block-reverse | squares-evens | file:<path>
"""
from typing import Callable, Dict, List, Optional, Tuple, TypeVar
import logging

from app.core.config import settings
from app.core.errors import ArgumentError
from app.models.counterexample import CounterexampleParams, RSet
from app.models.ideals import IdealSpec
from app.models.matrices import (
    CesaroMatrix,
    DiagonalMatrix,
    IdentityMatrix,
    PermutationMatrix,
    PickNthMatrix,
    RowMatrix,
    SplitPairMatrix,
)
from app.models.permutations import (
    BlockReverse,
    BlockSwap,
    IdentityPermutation,
    PairSwap,
    Permutation,
    SquaresEvens,
)
from app.models.sequences import (
    AbsSequence,
    AffineSequence,
    AlternatingHarmonicSequence,
    AlternatingSequence,
    ConstantSequence,
    IndicatorSequence,
    LazySequence,
    MaskedSequence,
    SquaresDiagonalSequence,
)
from app.models.sets import (
    ArithmeticProgression,
    Complement,
    EmptySet,
    FactorialBlocks,
    FiniteSet,
    RangeSet,
    SetGen,
    Union,
    all_integers,
    cubes,
    evens,
    odds,
    squares,
)
from app.models.weights import LinearWeight, NLogWeight, PiecewiseWeight, PowerWeight, WeightFn
from app.services.construction_service import build_counterexample_A, build_counterexample_B
from app.utils import file_formats

logger = logging.getLogger(__name__)

T = TypeVar("T")

SIMPLE_SETS: Dict[str, Callable[[], SetGen]] = {
    "empty": EmptySet,
    "all": all_integers,
    "evens": evens,
    "odds": odds,
    "squares": squares,
    "cubes": cubes,
    "factorial-blocks": FactorialBlocks,
}

SIMPLE_PERMUTATIONS: Dict[str, Callable[[], Permutation]] = {
    "identity": IdentityPermutation,
    "pair-swap": PairSwap,
    "block-swap": BlockSwap,
    "block-reverse": BlockReverse,
    "squares-evens": SquaresEvens,
}


def _split_head(spec: str) -> Tuple[str, str]:
    head, _, rest = spec.partition(":")
    return head.strip(), rest.strip()


def _int(token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ArgumentError(f"{what} must be an integer, got {token!r}")


def _float(token: str, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ArgumentError(f"{what} must be a number, got {token!r}")


def _first_split(rest: str, separator: str, left: Callable[[str], object], right: Callable[[str], object], spec: str):
    """Try every separator position from the left until both halves parse."""
    positions = [i for i, char in enumerate(rest) if char == separator]
    for i in positions:
        try:
            return left(rest[:i]), right(rest[i + 1:])
        except ArgumentError:
            continue
    raise ArgumentError(f"cannot split {spec!r} into two valid parts at {separator!r}")


def parse_set(spec: str) -> SetGen:
    spec = spec.strip()
    if spec in SIMPLE_SETS:
        return SIMPLE_SETS[spec]()
    head, rest = _split_head(spec)
    if head == "ap":
        parts = rest.split(",")
        if len(parts) != 2:
            raise ArgumentError(f"expected ap:<step>,<offset>, got {spec!r}")
        step, offset = _int(parts[0], "ap step"), _int(parts[1], "ap offset")
        if step < 1:
            raise ArgumentError(f"ap step must be positive, got {step}")
        return ArithmeticProgression(step, offset)
    if head == "finite":
        values = [_int(v, "finite member") for v in rest.split(",") if v.strip()]
        if any(v < 1 for v in values):
            raise ArgumentError(f"finite set members must be positive, got {values}")
        return FiniteSet(values)
    if head == "range":
        parts = rest.split(",")
        if len(parts) != 2:
            raise ArgumentError(f"expected range:<lo>,<hi>, got {spec!r}")
        lo, hi = _int(parts[0], "range start"), _int(parts[1], "range end")
        if lo < 1 or hi < lo:
            raise ArgumentError(f"range must satisfy 1 <= lo <= hi, got {lo},{hi}")
        return RangeSet(lo, hi)
    if head == "complement":
        return Complement(parse_set(rest))
    if head == "union":
        left, right = _first_split(rest, "|", parse_set, parse_set, spec)
        return Union(left, right)
    if head == "R":
        max_block = _int(rest, "R maxBlock")
        if max_block < 1:
            raise ArgumentError(f"R needs maxBlock >= 1, got {max_block}")
        return RSet(max_block)
    if head == "file" and rest:
        return file_formats.read_set_file(rest)
    raise ArgumentError(f"unknown set spec {spec!r}")


def parse_weight(spec: str) -> WeightFn:
    spec = spec.strip()
    if spec == "n":
        return LinearWeight()
    if spec == "n2":
        return PowerWeight(2)
    if spec == "nlog":
        return NLogWeight()
    if spec == "piecewise":
        return PiecewiseWeight()
    head, rest = _split_head(spec)
    if head == "piecewise":
        return PiecewiseWeight(parse_set(rest))
    if head == "table" and rest:
        return file_formats.read_weight_table(rest)
    raise ArgumentError(f"unknown weight spec {spec!r}")


def parse_ideal(spec: str) -> IdealSpec:
    spec = spec.strip()
    if spec == "fin":
        return IdealSpec.fin()
    if spec == "z":
        return IdealSpec.z()
    if spec == "uniform":
        return IdealSpec.uniform()
    head, rest = _split_head(spec)
    if head == "zg":
        return IdealSpec.zg(parse_weight(rest))
    raise ArgumentError(f"unknown ideal spec {spec!r}")


def parse_sequence(spec: str) -> LazySequence:
    spec = spec.strip()
    if spec == "alt":
        return AlternatingSequence()
    if spec == "alt-harmonic":
        return AlternatingHarmonicSequence()
    if spec == "sqdiag":
        return SquaresDiagonalSequence(squares())
    head, rest = _split_head(spec)
    if head == "const":
        return ConstantSequence(_float(rest, "constant"))
    if head == "indicator":
        return IndicatorSequence(parse_set(rest))
    if head == "affine":
        parts = rest.split(",", 2)
        if len(parts) != 3:
            raise ArgumentError(f"expected affine:<a>,<b>,<inner>, got {spec!r}")
        return AffineSequence(_float(parts[0], "affine a"), _float(parts[1], "affine b"), parse_sequence(parts[2]))
    if head == "abs":
        return AbsSequence(parse_sequence(rest))
    if head == "mul":
        members, inner = _first_split(rest, ",", parse_set, parse_sequence, spec)
        return MaskedSequence(members, inner)
    if head == "file" and rest:
        return file_formats.read_sequence_file(rest)
    raise ArgumentError(f"unknown sequence spec {spec!r}")


def parse_permutation(spec: str) -> Permutation:
    spec = spec.strip()
    if spec in SIMPLE_PERMUTATIONS:
        return SIMPLE_PERMUTATIONS[spec]()
    head, rest = _split_head(spec)
    if head == "file" and rest:
        return file_formats.read_permutation_file(rest)
    raise ArgumentError(f"unknown permutation spec {spec!r}")


def parse_counterexample_params(rest: str, max_block: Optional[int] = None) -> CounterexampleParams:
    """<set>[:<maxBlock>]; an explicit max_block argument wins over the suffix."""
    i_set: Optional[SetGen] = None
    suffix: Optional[int] = None
    head, _, tail = rest.rpartition(":")
    if head and tail.strip().isdigit():
        try:
            i_set = parse_set(head)
            suffix = int(tail)
        except ArgumentError:
            i_set = None
    if i_set is None:
        i_set = parse_set(rest)
    chosen = max_block if max_block is not None else suffix
    return CounterexampleParams(i_set, settings.DEFAULT_MAX_BLOCK if chosen is None else chosen)


def parse_matrix(spec: str) -> RowMatrix:
    spec = spec.strip()
    if spec == "cesaro":
        return CesaroMatrix()
    if spec == "identity":
        return IdentityMatrix()
    if spec == "pick-nth":
        return PickNthMatrix(squares())
    if spec == "split-pair":
        return SplitPairMatrix(squares())
    head, rest = _split_head(spec)
    if head == "diag":
        return DiagonalMatrix(parse_sequence(rest))
    if head == "perm":
        return PermutationMatrix(parse_permutation(rest))
    if head == "pick-nth":
        return PickNthMatrix(parse_set(rest))
    if head == "split-pair":
        return SplitPairMatrix(parse_set(rest))
    if head == "counterexample-a":
        return build_counterexample_A(parse_counterexample_params(rest))
    if head == "counterexample-b":
        return build_counterexample_B(parse_counterexample_params(rest))
    if head == "file" and rest:
        return file_formats.read_matrix_file(rest)
    raise ArgumentError(f"unknown matrix spec {spec!r}")


def parse_list(raw: Optional[str], parser: Callable[[str], T], separator: str = ";") -> List[T]:
    """Lists of specs are ';'-separated, since specs themselves contain commas."""
    if raw is None:
        return []
    return [parser(item) for item in raw.split(separator) if item.strip()]


def parse_floats(raw: Optional[str]) -> Optional[List[float]]:
    if raw is None:
        return None
    return [_float(item, "grid value") for item in raw.split(",") if item.strip()]


def parse_ints(raw: Optional[str]) -> Optional[List[int]]:
    if raw is None:
        return None
    return [_int(item, "integer list value") for item in raw.split(",") if item.strip()]
