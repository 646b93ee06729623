from typing import List, Optional
import sys
import logging
import platform

from app.cli.cli import build_parser
from app.core.config import settings
from app.core.errors import LabError

logger = logging.getLogger(__name__)

INTERNAL_ERROR = 70


def configure_logging(level: Optional[str] = None) -> None:
    # stdout is reserved for reports
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.LOG_FILE:
        handlers.append(logging.FileHandler(settings.LOG_FILE))
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        configure_logging(args.log_level)
        logger.debug(f"Python {platform.python_version()} on {platform.system()} {platform.release()}")
        logger.info(f"Running {args.command} ({settings.ENVIRONMENT})")
        return args.handler(args)
    except LabError as e:
        logger.error(f"{type(e).__name__}: {e.detail}")
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error: {str(e)}", exc_info=True)
        print(f"error: {str(e)}", file=sys.stderr)
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
