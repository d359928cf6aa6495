import argparse
import logging
import sys
from pathlib import Path

from app import __version__
from app.api import bounds, compare, evaluate, mellin, probe, sieve
from app.api.common import CommandError
from app.config import activate, load_run_config
from app.services.errors import OGFError

logger = logging.getLogger(__name__)

COMMANDS = (sieve, evaluate, mellin, compare, bounds, probe)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ogf",
        description="Ordinary generating functions of arithmetic sequences near the unit circle",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, default=None, help="key = value run configuration")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    parser.add_argument("--timings", action="store_true", help="include wall-clock timings in JSON")

    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS:
        module.register(subparsers)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse: 0 for --help/--version, 2 for usage errors
        return 0 if e.code in (0, None) else 2

    try:
        settings = activate(load_run_config(args.config).with_overrides(log_level=args.log_level))
        logging.basicConfig(
            level=settings.log_level.upper(),
            stream=sys.stderr,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
            force=True,
        )
        logger.debug("running %s", args.command)
        args.handler(args)
    except CommandError as e:
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code
    except OGFError as e:
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        # e.g. an invalid log level
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.exception("%s failed", args.command)
        print(f"error: internal failure in {args.command}: {e}", file=sys.stderr)
        return 3
    return 0
