import argparse
import logging

from app.cli.commands.common import add_common_arguments, eps_grid, finish
from app.core.errors import ArgumentError
from app.services.density_service import resolve_max_n
from app.services.permutation_service import (
    check_growth_condition,
    check_P3,
    check_P4_zero_limit_point,
    levy_group_test,
    permutation_regularity,
    sigma_hat,
)
from app.services.registry import parse_floats, parse_ideal, parse_ints, parse_list, parse_permutation, parse_set, parse_weight

logger = logging.getLogger(__name__)

TESTS = ["levy", "p3", "p4", "growth", "regularity", "sigma-hat"]


def register(subparsers) -> None:
    parser = subparsers.add_parser("permute", help="rearrangement tests for a permutation of the positive integers")
    parser.add_argument("--perm", required=True)
    parser.add_argument("--test", required=True, choices=TESTS)
    parser.add_argument("--ideal-i", default="z")
    parser.add_argument("--ideal-j", default="z")
    parser.add_argument("--set", dest="set_spec", default=None, help="member of I for p3")
    parser.add_argument("--family", default=None, help="';'-separated members of I for regularity")
    parser.add_argument("--weight-g", default="n", help="g for the growth test")
    parser.add_argument("--weight-h", default="n", help="h for p4 and the growth test")
    parser.add_argument("--alphas", default="2", help="dilations α > 1 for the growth test")
    parser.add_argument("--checkpoints", default=None, help="explicit checkpoints for levy")
    parser.add_argument("--no-companion", action="store_true", help="skip the n/σ(n) companion check for levy")
    parser.add_argument("--n", type=int, default=None, help="index for sigma-hat")
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    sigma = parse_permutation(args.perm)
    max_n = resolve_max_n(args.max_n)
    grid = eps_grid(args)
    params = {"perm": sigma.label, "test": args.test}
    test = args.test

    if test == "sigma-hat":
        if args.n is None or args.n < 1:
            raise ArgumentError("--test sigma-hat needs --n >= 1")
        params["n"] = args.n
        return finish("permute", args, params, {"n": args.n, "sigmaHat": sigma_hat(sigma, args.n)}, None)

    if test == "levy":
        report = levy_group_test(
            sigma, max_n, parse_ints(args.checkpoints), args.zero_tol, not args.no_companion, args.threads
        )
    elif test == "p3":
        if args.set_spec is None:
            raise ArgumentError("--test p3 needs --set")
        J = parse_ideal(args.ideal_j)
        params["idealJ"] = J.label
        report = check_P3(sigma, parse_set(args.set_spec), J, max_n, args.zero_tol)
    elif test == "p4":
        h = parse_weight(args.weight_h)
        params["h"] = h.label
        report = check_P4_zero_limit_point(sigma, h, max_n, grid, args.zero_tol, args.threads)
    elif test == "growth":
        g, h = parse_weight(args.weight_g), parse_weight(args.weight_h)
        params.update({"g": g.label, "h": h.label, "alphas": args.alphas})
        report = check_growth_condition(g, h, parse_floats(args.alphas) or [], max_n)
    else:
        family = parse_list(args.family, parse_set)
        I, J = parse_ideal(args.ideal_i), parse_ideal(args.ideal_j)
        params.update({"idealI": I.label, "idealJ": J.label})
        report = permutation_regularity(sigma, I, J, family, max_n, grid, args.zero_tol, args.threads)

    return finish("permute", args, params, {"report": report}, report.verdict)
