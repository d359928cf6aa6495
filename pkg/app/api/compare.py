from pathlib import Path

import mpmath

from app.api.common import (
    add_output_option,
    add_precision_options,
    domain_errors,
    emit_csv,
    format_cell,
    parse_fn,
    parse_grid,
    precision,
    tolerance,
)
from app.schemas.asym import MainTermSource
from app.services import asym, export, series
from app.services.errors import DomainError

COLUMNS = ["t", "direct_re", "direct_im", "main_re", "main_im", "residual_abs",
           "envelope_E", "ratio_residual_over_envelope"]


def register(subparsers):
    parser = subparsers.add_parser(
        "compare",
        help="direct sum against the main term on a t grid; envelope cells stay empty for t >= exp(-e^e)",
    )
    parser.add_argument("--fn", required=True)
    parser.add_argument("--t-grid", required=True, help="A:B:steps, log-spaced")
    parser.add_argument("--main-term", choices=["paper", "residue"], default="paper")
    parser.add_argument("--svg", type=Path, default=None, help="also write a log-log SVG chart")
    parser.add_argument("--envelope-grid", default=None,
                        help="t grid (A:B:steps) on which the chart also draws E(t) and the Abelian envelope")
    parser.add_argument("--c", type=float, default=1.0, help="constant of the Abelian envelope")
    add_precision_options(parser)
    add_output_option(parser, "CSV path (default: stdout)")
    parser.set_defaults(handler=cmd_compare)


def _envelope(t, pc):
    """E(t), or None where the triple logarithm is undefined"""
    try:
        return asym.error_envelope_E(t, pc=pc)
    except DomainError:
        return None


def _envelope_curves(grid: list, c, pc) -> list:
    """(name, ts, values) for E and the Abelian envelope where each is defined"""
    curves = []
    for name, fn in (("envelope_E", lambda t: asym.error_envelope_E(t, pc=pc)),
                     (f"abelian_mu(c={c:g})", lambda t: asym.abelian_mu_envelope(t, c, pc))):
        ts, values = [], []
        for t in grid:
            try:
                values.append(fn(t))
            except DomainError:
                continue
            ts.append(t)
        curves.append((name, ts, values))
    return curves


def cmd_compare(args):
    fn_id = parse_fn(args.fn)
    pc = precision(args)
    grid = parse_grid(args.t_grid, pc)
    envelope_grid = parse_grid(args.envelope_grid, pc) if args.envelope_grid else []
    source = MainTermSource.parse(args.main_term)
    target = tolerance(args)

    rows, plotted = [COLUMNS], []
    with domain_errors():
        asym.main_term_form(fn_id, source)
        for t in grid:
            with pc.workprec():
                z = mpmath.exp(-t)
            direct = series.eval_power_series(fn_id, z, pc, target).value
            main = asym.corollary_main_term(fn_id, z, source, pc)
            with pc.workprec():
                residual = abs(direct - main)
            envelope = _envelope(t, pc)
            ratio = residual / envelope if envelope is not None else None
            rows.append([
                format_cell(t, pc),
                format_cell(direct.real, pc), format_cell(direct.imag, pc),
                format_cell(main.real, pc), format_cell(main.imag, pc),
                format_cell(residual, pc),
                "" if envelope is None else format_cell(envelope, pc),
                "" if ratio is None else format_cell(ratio, pc),
            ])
            plotted.append((t, residual, envelope))
        curves = _envelope_curves(sorted(set(envelope_grid) | {p[0] for p in plotted}), args.c, pc)
    emit_csv(rows, args.out)

    if args.svg is not None:
        chart = export.loglog_svg(
            [("residual_abs", [p[0] for p in plotted], [p[1] for p in plotted])] + curves,
            x_label="t", y_label="|F - main|", title=f"{fn_id.value}: residual vs envelopes",
        )
        args.svg.parent.mkdir(parents=True, exist_ok=True)
        args.svg.write_text(chart)
