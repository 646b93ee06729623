import argparse

from app.cli.commands.common import add_common_arguments, finish
from app.services.suite_service import run_suite


def register(subparsers) -> None:
    parser = subparsers.add_parser("suite", help="run the desk-scale acceptance battery")
    parser.add_argument("--only", default=None, help="comma-separated case names")
    add_common_arguments(parser, max_n=False, eps=False)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    only = [name.strip() for name in args.only.split(",") if name.strip()] if args.only else None
    report = run_suite(threads=args.threads, only=only)
    return finish("suite", args, {"only": only}, {"report": report}, report.verdict)
