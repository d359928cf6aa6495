import sys

from mpmath import mpf

from app.api.common import (
    CommandError,
    add_output_option,
    add_precision_options,
    domain_errors,
    emit_csv,
    format_cell,
    parse_grid,
    precision,
    tolerance,
)
from app.services import asym

KINDS = ("fake-asym", "rh-window", "delange", "prime-abelian", "main-term", "balance")


def register(subparsers):
    parser = subparsers.add_parser(
        "probe",
        help="numerical probes; fake-asym, main-term and balance take a t grid, the others a grid of 1 - z",
    )
    parser.add_argument("--kind", required=True, help=f"one of {', '.join(KINDS)}")
    parser.add_argument("--grid", required=True, help="A:B:steps, log-spaced")
    parser.add_argument("--eta", type=float, default=0.5, help="exponent for rh-window")
    add_precision_options(parser)
    add_output_option(parser, "CSV path; rh-window writes the Mertens table next to it")
    parser.set_defaults(handler=cmd_probe)


def _rows(table, pc):
    yield table.columns
    for row in table.rows:
        yield [format_cell(v, pc) for v in row]


def _tables(kind: str, grid: list, args, pc, target) -> list:
    if kind == "fake-asym":
        return [asym.fake_asymptotics_probe(grid, pc, target)]
    if kind == "main-term":
        return [asym.main_term_table(grid, pc, target)]
    if kind == "balance":
        return [asym.balance_report(grid, pc)]
    with pc.workprec():
        zs = [1 - mpf(d) for d in grid]
    if kind == "rh-window":
        return list(asym.rh_window_probe(args.eta, zs, pc, target))
    if kind == "delange":
        return [asym.delange_probe(zs, pc, target)]
    return [asym.prime_abelian_probe(zs, pc, max(target, 1e-6))]


def cmd_probe(args):
    if args.kind not in KINDS:
        raise CommandError(2, f"unknown probe kind {args.kind!r}; expected one of {', '.join(KINDS)}")
    pc = precision(args)
    grid = parse_grid(args.grid, pc)
    # probes trade the default tolerance for reach
    target = args.tol if args.tol is not None else max(tolerance(args), 1e-10)

    with domain_errors():
        tables = _tables(args.kind, grid, args, pc, target)

    if args.out is None:
        for i, table in enumerate(tables):
            if i:
                sys.stdout.write("\n")
            emit_csv(_rows(table, pc))
        return
    emit_csv(_rows(tables[0], pc), args.out)
    for table in tables[1:]:
        suffix = table.name.rsplit("-", 1)[-1]
        emit_csv(_rows(table, pc), args.out.with_name(f"{args.out.stem}_{suffix}{args.out.suffix}"))
