import argparse

from app.cli.commands.common import add_common_arguments, finish
from app.services.construction_service import construct_T3_witness
from app.services.registry import parse_matrix, parse_set


def register(subparsers) -> None:
    parser = subparsers.add_parser("witness", help="greedy ±1 witness against T3 along a member of I")
    parser.add_argument("--matrix", required=True)
    parser.add_argument("--iset", default="squares")
    parser.add_argument("--steps", type=int, default=None)
    parser.add_argument("--bins", type=int, default=None)
    add_common_arguments(parser, eps=False)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    A = parse_matrix(args.matrix)
    I_enum = parse_set(args.iset)
    trace = construct_T3_witness(A, I_enum, args.max_n, args.steps, args.zero_tol, args.bins, args.threads)
    params = {"matrix": A.label, "iset": I_enum.label, "steps": args.steps}
    return finish("witness", args, params, {"trace": trace}, trace.verdict)
