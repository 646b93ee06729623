import argparse

from app.cli.commands.common import add_common_arguments, eps_grid, finish
from app.models.schemas import Verdict
from app.services.density_service import resolve_max_n
from app.services.registry import parse_ideal, parse_sequence
from app.services.sequence_service import propose_ideal_limit, verify_ideal_limit


def register(subparsers) -> None:
    parser = subparsers.add_parser("limit", help="check or propose an ideal limit of a sequence")
    parser.add_argument("--sequence", required=True)
    parser.add_argument("--ideal", default="z")
    parser.add_argument("--eta", type=float, default=None, help="candidate limit; proposed from the data when omitted")
    parser.add_argument("--bins", type=int, default=None)
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    x = parse_sequence(args.sequence)
    ideal = parse_ideal(args.ideal)
    max_n = resolve_max_n(args.max_n)
    params = {"sequence": x.label, "ideal": ideal.label, "eta": args.eta}

    eta = args.eta
    proposed = eta is None
    if proposed:
        eta = propose_ideal_limit(x, ideal, max_n, args.zero_tol, args.bins)
        if eta is None:
            verdict = Verdict.inconclusive(f"no unique {ideal.label}-limit candidate for {x.label}", bound=max_n)
            return finish("limit", args, params, {"candidate": None}, verdict)

    report = verify_ideal_limit(x, eta, ideal, max_n, eps_grid(args), args.zero_tol, args.threads)
    return finish("limit", args, params, {"proposed": proposed, "report": report}, report.verdict)
