"""Command-line entry point: ``msgnn <command> [options]``."""

import argparse
import logging
import sys
from typing import List, NoReturn, Optional

from pydantic import ValidationError

from ..config import settings, setup_logging
from ..errors import FileSystemError, MsgnnError
from . import ablate, derain, evaluate, params, synth, train
from .config_file import config_error

logger = logging.getLogger(__name__)

COMMANDS = (synth, train, derain, evaluate, ablate, params)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2


def _one_line(message: str) -> str:
    return " ".join(str(message).split())


class MsgnnArgumentParser(argparse.ArgumentParser):
    """Reports usage problems as a single ``error:usage:`` line."""

    def error(self, message: str) -> NoReturn:
        sys.stderr.write(f"error:usage: {_one_line(message)}\n")
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = MsgnnArgumentParser(
        prog="msgnn",
        description="Single-image deraining with a multi-scale patch graph network",
    )
    parser.add_argument("--log-level", default=settings.log_level, help="Logging level (default: %(default)s)")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not isinstance(logging.getLevelName(args.log_level.upper()), int):
        parser.error(f"unknown log level '{args.log_level}'")
    setup_logging(args.log_level)

    try:
        return args.handler(args) or EXIT_OK
    except ValidationError as e:
        error: MsgnnError = config_error(e)
    except MsgnnError as e:
        error = e
    except OSError as e:
        error = FileSystemError.from_os_error(e)
    logger.debug(f"❌ {args.command} failed: {error}")
    sys.stderr.write(f"error:{error.kind}: {_one_line(error.message)}\n")
    return EXIT_ERROR


__all__ = ["build_parser", "main"]
