import argparse

from app.cli.commands.common import add_common_arguments, eps_grid, finish
from app.core.errors import ArgumentError
from app.services.multiplier_service import corollary_inclusion_suite, diagonal_unbounded_probe, multiplier_check
from app.services.registry import parse_ideal, parse_list, parse_sequence, parse_set


def register(subparsers) -> None:
    parser = subparsers.add_parser("multiplier", help="multipliers between bounded ideal-null sequence spaces")
    parser.add_argument("--mode", choices=["check", "inclusion", "probe"], default="check")
    parser.add_argument("--sequence", default=None, help="multiplier s for check and probe")
    parser.add_argument("--family", default="squares", help="';'-separated members of I")
    parser.add_argument("--ideal-j", default="z")
    parser.add_argument("--samples", default="const:1;alt;indicator:evens", help="bounded samples for inclusion")
    parser.add_argument("--set", dest="set_spec", default="squares", help="set E for probe")
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    J = parse_ideal(args.ideal_j)
    grid = eps_grid(args)
    params = {"mode": args.mode, "idealJ": J.label}

    if args.mode == "inclusion":
        family = parse_list(args.family, parse_set)
        samples = parse_list(args.samples, parse_sequence)
        params.update({"family": [E.label for E in family], "samples": [s.label for s in samples]})
        report = corollary_inclusion_suite(family, J, samples, args.max_n, grid, args.zero_tol, args.threads)
        return finish("multiplier", args, params, {"report": report}, report.verdict)

    if args.sequence is None:
        raise ArgumentError(f"--mode {args.mode} needs --sequence")
    s = parse_sequence(args.sequence)
    params["sequence"] = s.label

    if args.mode == "probe":
        E = parse_set(args.set_spec)
        params["set"] = E.label
        report = diagonal_unbounded_probe(s, E, args.max_n, grid, args.zero_tol, args.threads)
        return finish("multiplier", args, params, {"report": report}, report.image_limit.verdict)

    family = parse_list(args.family, parse_set)
    params["family"] = [E.label for E in family]
    report = multiplier_check(s, family, J, args.max_n, grid, args.zero_tol, args.threads)
    return finish("multiplier", args, params, {"report": report}, report.verdict)
