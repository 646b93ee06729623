import argparse
import logging

from app.cli.commands.common import add_common_arguments, eps_grid, finish
from app.core.config import settings
from app.models.counterexample import CounterexampleParams
from app.models.schemas import Verdict
from app.services.construction_service import build_counterexample_A, build_counterexample_B, run_counterexample
from app.services.registry import parse_set
from app.utils.file_formats import export_matrix

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("construct", help="build the block counterexample and verify its invariants")
    parser.add_argument("--counterexample", required=True, choices=["A", "B"])
    parser.add_argument("--iset", default="squares", help="infinite member of I carrying the sign patterns")
    parser.add_argument("--max-block", type=int, default=None)
    parser.add_argument("--verify", action="store_true", help="also run T1, T2, T3, density of R and the WLLN check")
    parser.add_argument("--export", default=None, help="write the rows as JSON lines")
    parser.add_argument("--export-rows", type=int, default=None, help="last row to export (default: last block row)")
    parser.add_argument("--wlln-eps", type=float, default=0.25)
    add_common_arguments(parser, max_n=False)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    max_block = settings.DEFAULT_MAX_BLOCK if args.max_block is None else args.max_block
    params = CounterexampleParams(parse_set(args.iset), max_block)
    report = run_counterexample(
        args.counterexample, params, args.verify, eps_grid(args), args.wlln_eps, args.zero_tol, args.threads
    )

    if args.export:
        matrix = build_counterexample_A(params) if args.counterexample == "A" else build_counterexample_B(params)
        rows = args.export_rows or params.last_row()
        written = export_matrix(matrix, rows, args.export)
        logger.info(f"Exported {written} rows of {matrix.label} to {args.export}")
        report.export_path = args.export

    if report.invariants.all_hold:
        verdict = Verdict.satisfied(f"block invariants hold for {len(report.invariants.blocks)} blocks")
    else:
        failing = [block.block for block in report.invariants.blocks if not block.holds]
        verdict = Verdict.violated(failing, "block invariants fail")
    config = {"counterexample": args.counterexample, "iset": params.i_set.label, "maxBlock": max_block}
    return finish("construct", args, config, {"report": report}, verdict)
