import argparse

from app.cli.commands import check, construct, density, limit, multiplier, permute, suite, witness
from app.core.config import settings
from app.core.errors import UsageError

COMMANDS = [density, limit, check, construct, witness, permute, multiplier, suite]


class LabArgumentParser(argparse.ArgumentParser):
    """Usage errors raise UsageError (exit 64) instead of exiting with status 2."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> LabArgumentParser:
    parser = LabArgumentParser(prog="summalab", description=f"{settings.PROJECT_NAME} command line")
    parser.add_argument("--log-level", default=None, help="overrides LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", parser_class=LabArgumentParser)
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers)
    return parser
