import argparse
import logging

from app.cli.commands.common import add_common_arguments, finish
from app.core.errors import ArgumentError
from app.models.schemas import EstimateMode
from app.services.density_service import (
    assess_membership,
    resolve_max_n,
    uniform_density_zero_test,
    uniform_window_plan,
    upper_density,
    verdict_from_estimate,
)
from app.services.registry import parse_ideal, parse_ints, parse_set, parse_weight

logger = logging.getLogger(__name__)

MODES = {"tail": EstimateMode.TAIL_MAX, "running": EstimateMode.RUNNING_MAX}


def register(subparsers) -> None:
    parser = subparsers.add_parser("density", help="upper density of a set, or its membership in an ideal")
    parser.add_argument("--set", required=True, dest="set_spec")
    parser.add_argument("--ideal", default=None, help="decide membership in fin, z, zg:<weight> or uniform")
    parser.add_argument("--weight", default="n", help="weight for a plain estimate (ignored with --ideal)")
    parser.add_argument("--mode", choices=["tail", "running", "uniform"], default="tail")
    parser.add_argument("--windows", default=None, help="window lengths for --mode uniform")
    parser.add_argument("--checkpoints", default=None, help="explicit checkpoint plan")
    add_common_arguments(parser, eps=False)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    S = parse_set(args.set_spec)
    max_n = resolve_max_n(args.max_n)
    params = {"set": S.label, "ideal": args.ideal, "weight": args.weight, "mode": args.mode}

    if args.ideal is not None:
        ideal = parse_ideal(args.ideal)
        estimate, verdict = assess_membership(S, ideal, max_n, args.zero_tol)
        return finish("density", args, params, {"estimate": estimate, "verdict": verdict}, verdict)

    if args.mode == "uniform":
        windows = parse_ints(args.windows) or uniform_window_plan(max_n)
        estimate = uniform_density_zero_test(S, max_n, windows)
    else:
        if args.windows is not None:
            raise ArgumentError("--windows only applies to --mode uniform")
        estimate = upper_density(
            S, parse_weight(args.weight), max_n, parse_ints(args.checkpoints), MODES[args.mode], args.zero_tol
        )
    verdict = verdict_from_estimate(estimate, args.zero_tol)
    return finish("density", args, params, {"estimate": estimate, "verdict": verdict}, verdict)
