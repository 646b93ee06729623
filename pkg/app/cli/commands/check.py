from typing import List
import argparse
import logging

from app.cli.commands.common import add_common_arguments, eps_grid, finish
from app.core.errors import ArgumentError
from app.models.schemas import combine_verdicts
from app.services.density_service import resolve_max_n
from app.services.matrix_service import (
    check_c0_mapping,
    check_regularity,
    check_S1,
    check_S2,
    check_S3,
    check_sliding,
    check_T1,
    check_T2,
    check_T3,
    check_T4,
)
from app.services.registry import parse_ideal, parse_ints, parse_list, parse_matrix, parse_sequence, parse_set

logger = logging.getLogger(__name__)

CONDITIONS = ["T1", "T2", "T3", "T4", "S1", "S2", "S3", "sliding", "c0", "regularity"]


def register(subparsers) -> None:
    parser = subparsers.add_parser("check", help="check regularity conditions on a summability matrix")
    parser.add_argument("--matrix", required=True)
    parser.add_argument("--cond", required=True, help="comma-separated conditions: " + ",".join(CONDITIONS))
    parser.add_argument("--ideal-i", default="z")
    parser.add_argument("--ideal-j", default="z")
    parser.add_argument("--set", dest="set_spec", default=None, help="member of I for T3, dual-filter set for T4")
    parser.add_argument("--columns", default=None, help="columns for S3")
    parser.add_argument("--ms", default="1,10,100", help="prefix widths for sliding")
    parser.add_argument("--samples", default=None, help="';'-separated sequences for c0")
    parser.add_argument("--suite", default=None, help="';'-separated <sequence>=<eta> pairs for regularity")
    parser.add_argument("--family", default=None, help="';'-separated members of I for regularity")
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


def _conditions(raw: str) -> List[str]:
    conditions = [item.strip() for item in raw.split(",") if item.strip()]
    unknown = [item for item in conditions if item not in CONDITIONS]
    if not conditions or unknown:
        raise ArgumentError(f"--cond takes a comma-separated subset of {','.join(CONDITIONS)}, got {raw!r}")
    return conditions


def _suite_pair(item: str):
    sequence, separator, eta = item.rpartition("=")
    if not separator:
        raise ArgumentError(f"suite entries are <sequence>=<eta>, got {item!r}")
    try:
        return parse_sequence(sequence), float(eta)
    except ValueError:
        raise ArgumentError(f"suite limit must be a number, got {eta!r}")


def _required_set(args: argparse.Namespace, cond: str):
    if args.set_spec is None:
        raise ArgumentError(f"--cond {cond} needs --set")
    return parse_set(args.set_spec)


def _check(cond: str, A, I, J, max_n: int, grid, args: argparse.Namespace):
    if cond == "T1":
        return check_T1(A, max_n, args.threads)
    if cond == "S1":
        return check_S1(A, max_n, args.threads)
    if cond == "T2":
        return check_T2(A, J, max_n, grid, args.zero_tol, args.threads)
    if cond == "S2":
        return check_S2(A, max_n, grid, args.zero_tol, args.threads)
    if cond == "T3":
        return check_T3(A, _required_set(args, cond), I, J, max_n, grid, args.zero_tol, args.threads)
    if cond == "T4":
        return check_T4(A, _required_set(args, cond), I, J, max_n, grid, args.zero_tol, args.threads)
    if cond == "S3":
        return check_S3(A, parse_ints(args.columns), max_n, grid, args.zero_tol, args.threads)
    if cond == "sliding":
        return check_sliding(A, parse_ints(args.ms), max_n, grid, args.zero_tol, args.threads)
    if cond == "c0":
        samples = parse_list(args.samples, parse_sequence)
        if not samples:
            raise ArgumentError("--cond c0 needs --samples")
        return check_c0_mapping(A, I, J, samples, max_n, grid, args.zero_tol, args.threads)
    suite = parse_list(args.suite, _suite_pair)
    if not suite:
        raise ArgumentError("--cond regularity needs --suite")
    family = parse_list(args.family, parse_set)
    return check_regularity(A, I, J, suite, max_n, grid, family, args.zero_tol, args.threads)


def run(args: argparse.Namespace) -> int:
    conditions = _conditions(args.cond)
    A = parse_matrix(args.matrix)
    max_n = resolve_max_n(args.max_n)
    grid = eps_grid(args)
    I, J = parse_ideal(args.ideal_i), parse_ideal(args.ideal_j)
    params = {"matrix": A.label, "cond": args.cond, "idealI": I.label, "idealJ": J.label, "set": args.set_spec}

    reports = {}
    for cond in conditions:
        reports[cond] = _check(cond, A, I, J, max_n, grid, args)
        logger.info(f"{cond} on {A.label}: {reports[cond].verdict.status.value}")

    verdict = combine_verdicts([report.verdict for report in reports.values()], reason=f"{args.cond} on {A.label}")
    return finish("check", args, params, {"reports": reports}, verdict)
