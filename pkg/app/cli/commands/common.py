from pathlib import Path
from typing import Any, Dict, Optional
import argparse
import logging

from pydantic import BaseModel

from app.core.config import settings
from app.models.schemas import ExperimentConfig, ExperimentReport, Verdict
from app.services.registry import parse_floats
from app.utils.file_formats import collect_estimates, dump_report, report_payload, write_checkpoints_csv, write_report

logger = logging.getLogger(__name__)


def add_common_arguments(parser: argparse.ArgumentParser, max_n: bool = True, eps: bool = True) -> None:
    """Flags shared by every command."""
    if max_n:
        parser.add_argument("--max-n", type=int, default=None, help="prefix length N (default: DEFAULT_MAX_N)")
    if eps:
        parser.add_argument("--eps-grid", default=None, help="comma-separated, strictly decreasing epsilons")
    parser.add_argument("--zero-tol", type=float, default=None, help="zero tolerance (default: ZERO_TOL)")
    parser.add_argument("--threads", type=int, default=None, help="worker cap (default: available cores)")
    parser.add_argument("--output", default=None, help="report path; '-' prints to stdout")
    parser.add_argument("--csv", default=None, help="optional checkpoint dump")


def eps_grid(args: argparse.Namespace):
    return parse_floats(getattr(args, "eps_grid", None))


def payload(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return report_payload(value)
    if isinstance(value, dict):
        return {key: payload(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [payload(item) for item in value]
    return value


def finish(
    command: str,
    args: argparse.Namespace,
    params: Dict[str, Any],
    result: Dict[str, Any],
    verdict: Optional[Verdict],
) -> int:
    """
    Wrap a command result into an ExperimentReport, write it and map the verdict to an exit code

    Args:
        command: Subcommand name, also the default report file name
        args: Parsed arguments carrying the common flags
        params: Command-specific parameters echoed into the report
        result: Models or plain values, serialized as JSON
        verdict: Overall verdict; None means plain success

    Returns:
        0, 1 or 2 for Satisfied, Violated and Inconclusive; 0 without a verdict
    """
    output = args.output or str(Path(settings.OUTPUT_DIR) / f"{command}.json")
    config = ExperimentConfig(
        command=command,
        params={key: value for key, value in sorted(params.items()) if value is not None},
        max_n=getattr(args, "max_n", None),
        eps_grid=eps_grid(args),
        zero_tol=args.zero_tol,
        output=output,
    )
    report = ExperimentReport(config=config, result=payload(result), verdict=verdict)

    if output == "-":
        print(dump_report(report), end="")
    else:
        write_report(report, output)
        status = verdict.status.value if verdict is not None else "done"
        print(f"{command}: {status} -> {output}")

    if args.csv:
        estimates = collect_estimates(report_payload(report)["result"])
        write_checkpoints_csv(estimates, args.csv)
        logger.info(f"Checkpoint dump with {len(estimates)} estimates written to {args.csv}")

    return verdict.exit_code if verdict is not None else 0
