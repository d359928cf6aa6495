from pathlib import Path

from app.api.common import (
    CommandError,
    add_output_option,
    add_precision_options,
    budget_strings,
    domain_errors,
    emit_json,
    parse_fn,
    precision,
    report,
    tolerance,
)
from app.api.evaluate import eval_point
from app.config import settings
from app.schemas.contour import ContourSpec, QuadControls
from app.services import mellin
from app.services.export import write_json


def register(subparsers):
    parser = subparsers.add_parser("mellin", help="evaluate F(t) as an inverse Mellin integral")
    parser.add_argument("--fn", required=True)
    parser.add_argument("--t-abs", required=True, help="|t|, read as an exact decimal")
    parser.add_argument("--t-arg-deg", type=float, default=0.0)
    parser.add_argument("--contour", choices=["line", "deformed"], default="line")
    parser.add_argument("--kappa", default="auto", help="abscissa of the vertical line, or 'auto'")
    parser.add_argument("--T", type=float, default=10.0, help="height where the path leaves the line")
    parser.add_argument("--unsafe-tall-contour", action="store_true",
                        help="allow T above the certified zero-free height")
    parser.add_argument("--samples", type=Path, default=None,
                        help="also write |integrand| and its majorant along the path as JSON")
    add_precision_options(parser)
    add_output_option(parser, "JSON path (default: stdout)")
    parser.set_defaults(handler=cmd_mellin)


def _kappa(args, point):
    if args.kappa == "auto":
        return mellin.default_kappa(point.t)
    try:
        return float(args.kappa)
    except ValueError:
        raise CommandError(2, f"--kappa must be a number or 'auto', got {args.kappa!r}")


def cmd_mellin(args):
    fn_id = parse_fn(args.fn)
    pc = precision(args)
    point = eval_point(args, pc)
    target = tolerance(args)
    kappa = _kappa(args, point)
    spec = None
    with domain_errors():
        if args.contour == "line":
            result = mellin.inverse_mellin_line(fn_id, point, kappa, pc, target)
        else:
            spec = ContourSpec(
                kappa=float(kappa),
                T=args.T,
                region=mellin.default_region(),
                quad=QuadControls(max_degree=settings.quad_max_degree, target_abs_err=target),
                unsafe_override=args.unsafe_tall_contour,
            )
            result = mellin.inverse_mellin_deformed(fn_id, point, spec, pc, target)
        document = report(
            "mellin", [mellin.mellin_result(result, pc)], args,
            error_budgets=budget_strings(pc, truncation=result.result.tail_bound,
                                         quadrature=result.result.rounding_slack),
            timings={"seconds": result.result.wall_notes.get("seconds", 0.0)},
        )
        if args.samples is not None:
            nu = mellin.registry.get(fn_id).nu
            c_d, rows = mellin.path_samples(fn_id, point, pc, kappa, result.height, spec=spec, nu=nu)
            write_json(mellin.samples_document(fn_id, args.contour, c_d, nu, rows, pc), path=args.samples)
    emit_json(document, args.out)
