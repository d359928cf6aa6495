"""Shared command plumbing: error mapping, argument parsing, report assembly."""
import argparse
import contextlib
import sys
from pathlib import Path
from typing import Iterable, Optional

import mpmath
from mpmath import mpf
from pydantic import ValidationError

from app.config import settings
from app.schemas.arith import ArithFunctionId
from app.schemas.numeric import PrecisionContext
from app.schemas.report import ReportBundle
from app.services.errors import OGFError
from app.services.export import sci, write_csv, write_json


class CommandError(Exception):
    """A failed command: exit code and a message for stderr"""

    def __init__(self, exit_code: int, detail: str):
        super().__init__(detail)
        self.exit_code = exit_code
        self.detail = detail


@contextlib.contextmanager
def domain_errors():
    """Map service and validation errors onto exit codes"""
    try:
        yield
    except OGFError as e:
        raise CommandError(e.exit_code, e.detail)
    except ValidationError as e:
        first = e.errors()[0]
        raise CommandError(2, first["msg"])


def parse_fn(name: str) -> ArithFunctionId:
    try:
        return ArithFunctionId.parse(name)
    except ValueError as e:
        raise CommandError(2, str(e))


def parse_grid(text: str, pc: PrecisionContext) -> list:
    """
    'A:B:steps' (log-spaced, both ends included) or a comma-separated list.
    Decimal endpoints are read at the working precision; interior points are
    rounded back to `bits` so that CSV cells print cleanly.
    """
    try:
        with pc.workprec():
            if ":" in text:
                start, stop, steps = text.split(":")
                start, stop, steps = mpf(start), mpf(stop), int(steps)
                if start <= 0 or stop <= 0 or steps < 1:
                    raise ValueError
                if steps == 1:
                    return [start]
                ratio = (stop / start) ** (mpf(1) / (steps - 1))
                inner = [pc.round(start * ratio ** k) for k in range(1, steps - 1)]
                return [start] + inner + [stop]
            return [mpf(item) for item in text.split(",") if item.strip()]
    except (ValueError, TypeError):
        raise CommandError(2, f"invalid grid {text!r}; expected A:B:steps or a comma list")


def parse_positive(text: str, flag: str, pc: PrecisionContext) -> mpf:
    """A positive decimal read at the working precision"""
    try:
        with pc.workprec():
            value = mpf(text)
    except (ValueError, TypeError):
        raise CommandError(2, f"{flag} must be a number, got {text!r}")
    if not value > 0:
        raise CommandError(2, f"{flag} must be positive, got {text}")
    return value


def positive_float(text: str) -> float:
    """argparse type: a positive number"""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def add_precision_options(parser):
    parser.add_argument("--prec", type=int, default=None, help="precision in bits (default from config)")
    parser.add_argument("--tol", type=positive_float, default=None, help="absolute error target")


def add_output_option(parser, help_text: str = "output path (default: stdout)"):
    parser.add_argument("--out", type=Path, default=None, help=help_text)


def precision(args) -> PrecisionContext:
    bits = args.prec if getattr(args, "prec", None) is not None else settings.precision_bits
    if bits < 53:
        raise CommandError(2, f"--prec must be at least 53 bits, got {bits}")
    return PrecisionContext(bits=bits, guard_bits=settings.guard_bits)


def tolerance(args) -> float:
    return args.tol if getattr(args, "tol", None) is not None else settings.tolerance


def budget_strings(pc: PrecisionContext, **budgets) -> dict:
    return {name: sci(value, pc) for name, value in budgets.items()}


def report(command: str, results: list, args, error_budgets: Optional[dict] = None,
           timings: Optional[dict] = None) -> dict:
    bundle = ReportBundle(
        command=command,
        config=settings.model_dump(mode="json"),
        results=results,
        error_budgets=error_budgets or {},
        timings=timings if getattr(args, "timings", False) else None,
    )
    return bundle.document()


def emit_json(document: dict, out: Optional[Path] = None):
    write_json(document, path=out, stream=sys.stdout)


def emit_csv(rows: Iterable, out: Optional[Path] = None):
    if out is None:
        write_csv(rows, stream=sys.stdout)
    else:
        write_csv(rows, path=out)


def format_cell(value, pc: PrecisionContext):
    """CSV cell: ints as-is, everything numeric in scientific notation"""
    if isinstance(value, (int, str)):
        return value
    if isinstance(value, mpmath.mpc):
        value = value.real
    return sci(value, pc)
