import math

from app.api.common import (
    CommandError,
    add_output_option,
    add_precision_options,
    budget_strings,
    domain_errors,
    emit_json,
    parse_fn,
    parse_positive,
    precision,
    report,
    tolerance,
)
from app.config import settings
from app.schemas.numeric import EvalPoint, PrecisionContext
from app.services import series


def register(subparsers):
    parser = subparsers.add_parser("eval", help="sum a_n e^{-nt} directly")
    parser.add_argument("--fn", required=True)
    parser.add_argument("--t-abs", required=True, help="|t|, read as an exact decimal")
    parser.add_argument("--t-arg-deg", type=float, default=0.0, help="arg t in degrees")
    add_precision_options(parser)
    add_output_option(parser, "JSON path (default: stdout)")
    parser.set_defaults(handler=cmd_eval)


def eval_point(args, pc: PrecisionContext) -> EvalPoint:
    """t from --t-abs/--t-arg-deg, guarded by |arg t| <= 90 - theta_min degrees"""
    t_abs = parse_positive(args.t_abs, "--t-abs", pc)
    limit = 90.0 - settings.theta_min_deg
    if abs(args.t_arg_deg) > limit:
        raise CommandError(2, f"|arg t| = {abs(args.t_arg_deg)} deg exceeds the sector limit {limit} deg")
    with domain_errors():
        return EvalPoint.from_polar(t_abs, math.radians(args.t_arg_deg),
                                    theta=math.radians(settings.theta_min_deg), pc=pc)


def cmd_eval(args):
    fn_id = parse_fn(args.fn)
    pc = precision(args)
    point = eval_point(args, pc)
    with domain_errors():
        result = series.eval_exp_series(fn_id, point, pc, tolerance(args))
        payload = series.series_result(fn_id, point, result, pc)
        with pc.workprec():
            payload["z_in_sector"] = series.sector_check(point.z, math.radians(settings.theta_min_deg))
        document = report(
            "eval", [payload], args,
            error_budgets=budget_strings(pc, tail_bound=result.tail_bound,
                                         rounding_slack=result.rounding_slack,
                                         input_rounding=result.input_rounding),
            timings={"seconds": result.wall_notes.get("seconds", 0.0)},
        )
    emit_json(document, args.out)
