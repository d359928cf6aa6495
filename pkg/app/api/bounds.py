import mpmath
from mpmath import mpf

from app.api.common import (
    CommandError,
    add_output_option,
    domain_errors,
    emit_json,
    parse_positive,
    precision,
    report,
)
from app.config import settings
from app.schemas.arith import ArithFunctionId
from app.schemas.asym import EnvelopeParams
from app.schemas.contour import SAFE_CONTOUR_HEIGHT, ContourSpec, QuadControls, ZeroFreeRegionSpec
from app.schemas.numeric import EvalPoint
from app.services import arith, asym, mellin
from app.services.export import sci

# Ford's constant, b = 0.05507 * 4.45^{-2/3}
FORD_B = 0.05507 * 4.45 ** (-2 / 3)

# Walfisz constants the E-versus-Abelian crossover is always reported for
CROSSOVER_C = (0.1, 1.0)


def register(subparsers):
    parser = subparsers.add_parser("bounds", help="envelopes and segment majorants at one t")
    parser.add_argument("--t-abs", required=True, help="|t|, read as an exact decimal (1e-1000 is fine)")
    parser.add_argument("--alpha", type=float, default=None)
    parser.add_argument("--beta", type=float, default=None)
    parser.add_argument("--b", default=None, help="zero-free region constant, or 'ford'")
    parser.add_argument("--nu", type=float, default=None)
    parser.add_argument("--c", type=float, default=1.0, help="constant of the Walfisz and Abelian envelopes")
    parser.add_argument("--fit-limit", type=int, default=10 ** 5,
                        help="sieve length for the fitted Walfisz constant (0 skips the fit)")
    parser.add_argument("--prec", type=int, default=None)
    add_output_option(parser, "JSON path (default: stdout)")
    parser.set_defaults(handler=cmd_bounds)


def _region_b(text) -> float:
    if text is None:
        return settings.region_b
    if text.strip().lower() == "ford":
        return FORD_B
    try:
        return float(text)
    except ValueError:
        raise CommandError(2, f"--b must be a number or 'ford', got {text!r}")


def _crossovers(c_values, params: EnvelopeParams, pc) -> dict:
    """log(1/t*) and t* per Walfisz constant"""
    out = {}
    for c in c_values:
        log_inv = asym.envelope_crossover(c, params, pc)
        with pc.workprec():
            t_star = pc.round(mpmath.exp(-log_inv))
        out[f"{c:g}"] = {"log_inv_t": sci(log_inv, pc), "t": sci(t_star, pc)}
    return out


def _walfisz_fit(limit: int):
    if limit <= 0:
        return None
    table = arith.sieve(ArithFunctionId.MOBIUS, limit, prefix_sums=True)
    return {"c_fit": asym.fit_walfisz_constant(table), "x_max": limit}


def cmd_bounds(args):
    pc = precision(args)
    t = parse_positive(args.t_abs, "--t-abs", pc)
    alpha = settings.region_alpha if args.alpha is None else args.alpha
    beta = settings.region_beta if args.beta is None else args.beta
    b = _region_b(args.b)
    nu = settings.nu if args.nu is None else args.nu

    with domain_errors():
        params = EnvelopeParams(b=b, alpha=alpha, beta=beta)
        envelope = asym.error_envelope_E(t, params, pc)
        T = asym.choose_T(t, alpha)
        clamped = T > SAFE_CONTOUR_HEIGHT
        if clamped:
            T = mpf(SAFE_CONTOUR_HEIGHT)
        region = ZeroFreeRegionSpec(alpha=alpha, beta=beta, b=b, w=settings.region_w)
        kappa = mellin.default_kappa(t)
        spec = ContourSpec(kappa=float(kappa), T=float(T), region=region,
                           quad=QuadControls(target_abs_err=settings.tolerance))
        point = EvalPoint.real(t, pc=pc)
        majorants, c_d = mellin.segment_majorants(ArithFunctionId.MOBIUS, point, spec, pc, nu=nu)
        with pc.workprec():
            x = 1 / t
        c_values = sorted(set(CROSSOVER_C) | {args.c})
        payload = {
            "t": sci(t, pc),
            "params": {"alpha": alpha, "beta": beta, "b": b, "nu": nu, "c": args.c},
            "T": sci(T, pc),
            "T_clamped": clamped,
            "kappa": sci(kappa, pc),
            "g_T": sci(region.g(T), pc),
            "c_d": sci(c_d, pc),
            "majorants": {k: sci(v, pc) for k, v in majorants.items()},
            "error_envelope_E": sci(envelope, pc),
            "abelian_mu_envelope": sci(asym.abelian_mu_envelope(t, args.c, pc), pc),
            "walfisz_envelope": sci(asym.walfisz_envelope(x, args.c, pc), pc),
            "crossover": _crossovers(c_values, params, pc),
            "walfisz_fit": _walfisz_fit(args.fit_limit),
        }
    emit_json(report("bounds", [payload], args), args.out)
