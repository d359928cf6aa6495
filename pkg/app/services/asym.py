"""
Asymptotic envelopes, the tau expansion, closed-form main terms and the
numerical probes built on direct summation.

Envelope formulas are evaluated through L = log(1/t) so that t far below any
floating-point range (t = 10^-50 and smaller) is still usable.
"""
import logging
import math
from fractions import Fraction

import mpmath
import numpy as np
from mpmath import mpc, mpf

from app.schemas.arith import ArithFunctionId
from app.schemas.asym import EnvelopeParams, MainTermForm, MainTermSource, ProbeTable, SlowlyVarying
from app.schemas.contour import SAFE_CONTOUR_HEIGHT, ContourSpec, QuadControls
from app.schemas.numeric import EvalPoint, PrecisionContext
from app.services import arith, hpnum, mellin, series
from app.services.errors import DomainError, UnsupportedFunctionError

logger = logging.getLogger(__name__)

E_TO_E = math.exp(math.e)


# ---------------------------------------------------------------------------
# Envelopes
# ---------------------------------------------------------------------------

def _log_inverse(t_abs) -> mpf:
    """L = log(1/t); accepts numbers or strings such as '1e-50'"""
    t_abs = mpf(t_abs)
    if t_abs <= 0:
        raise DomainError("t must be positive")
    return -mpmath.log(t_abs)


def log_error_envelope(L, params: EnvelopeParams = None) -> mpf:
    """log E as a function of L = log(1/t); needs L > e^e"""
    params = params or EnvelopeParams()
    L = mpf(L)
    if L <= E_TO_E:
        raise DomainError(
            f"log log log(1/t) must be positive: need t < exp(-e^e) ~ 6.6e-7, got log(1/t) = {mpmath.nstr(L, 8)}"
        )
    log_l = mpmath.log(L)
    return L - params.rate * L / (log_l ** params.alpha * mpmath.log(log_l) ** params.beta)


def error_envelope_E(t_abs, params: EnvelopeParams = None, pc: PrecisionContext = None) -> mpf:
    """(1/t) exp(-(b - eps) log(1/t) / ((log log 1/t)^alpha (log log log 1/t)^beta))"""
    pc = pc or PrecisionContext()
    with pc.workprec():
        return pc.round(mpmath.exp(log_error_envelope(_log_inverse(t_abs), params)))


def walfisz_envelope(x, c, pc: PrecisionContext = None) -> mpf:
    """x exp(-c (log x)^{3/5} (log log x)^{-1/5})"""
    pc = pc or PrecisionContext()
    with pc.workprec():
        x = mpf(x)
        if x <= mpmath.e:
            raise DomainError(f"log log x must be positive, got x = {mpmath.nstr(x, 8)}")
        log_x = mpmath.log(x)
        return pc.round(x * mpmath.exp(-mpf(c) * log_x ** mpf(0.6) / mpmath.log(log_x) ** mpf(0.2)))


def fit_walfisz_constant(table: arith.SieveTable, x_max: int = None) -> float:
    """Largest c with |M(x)| <= walfisz_envelope(x, c) for e^e < x <= x_max"""
    if table.prefix_sums is None or table.fn_id != ArithFunctionId.MOBIUS:
        raise DomainError("the Walfisz fit needs a Mobius table with prefix sums")
    x_max = table.limit if x_max is None else min(x_max, table.limit)
    x = np.arange(int(E_TO_E) + 1, x_max + 1)
    m = np.abs(table.prefix_sums[x]).astype(np.float64)
    keep = m > 0
    x, m = x[keep].astype(np.float64), m[keep]
    if len(x) == 0:
        return math.inf
    log_x = np.log(x)
    # |M| <= x e^{-c u}  <=>  c <= (log x - log |M|) / u
    u = log_x ** 0.6 / np.log(log_x) ** 0.2
    c_fit = float(np.min((log_x - np.log(m)) / u))
    logger.info("fitted Walfisz constant c=%.6g on x <= %d", c_fit, x_max)
    return c_fit


def log_abelian_mu_envelope(L, c) -> mpf:
    L = mpf(L)
    if L <= mpmath.e:
        raise DomainError(f"log log(1/t) must be positive, got log(1/t) = {mpmath.nstr(L, 8)}")
    return L - mpf(c) * L ** mpf(0.6) / mpmath.log(L) ** mpf(0.2)


def abelian_mu_envelope(t_abs, c, pc: PrecisionContext = None) -> mpf:
    """(1/t) exp(-c (log 1/t)^{3/5} (log log 1/t)^{-1/5})"""
    pc = pc or PrecisionContext()
    with pc.workprec():
        return pc.round(mpmath.exp(log_abelian_mu_envelope(_log_inverse(t_abs), c)))


def envelope_crossover(c, params: EnvelopeParams = None, pc: PrecisionContext = None) -> mpf:
    """
    log(1/t*) beyond which error_envelope_E stays below abelian_mu_envelope(c).
    Near t = exp(-e^e) E is the smaller one as well; the reported crossover is the last sign change.
    """
    params = params or EnvelopeParams()
    pc = pc or PrecisionContext()
    with pc.workprec():
        def gap(L):
            return log_error_envelope(L, params) - log_abelian_mu_envelope(L, c)

        samples = [mpf(10) ** (k / mpf(4)) for k in range(5, 4 * 60)]
        samples = [L for L in samples if L > E_TO_E]
        above = [L for L in samples if gap(L) > 0]
        if not above:
            return pc.round(mpf(samples[0]))
        lo = above[-1]
        hi = lo * 2
        while gap(hi) > 0:
            lo, hi = hi, hi * 2
        for _ in range(pc.bits):
            mid = (lo + hi) / 2
            if gap(mid) > 0:
                lo = mid
            else:
                hi = mid
        logger.info("envelope crossover for c=%s at log(1/t)=%s", c, mpmath.nstr(hi, 10))
        return pc.round(hi)


def choose_T(t_abs, alpha=2 / 3) -> mpf:
    """T = log(1/t) / (log log 1/t)^alpha"""
    L = _log_inverse(t_abs)
    if L <= 1:
        raise DomainError(f"log log(1/t) must be positive, got t = {mpmath.nstr(mpf(t_abs), 8)}")
    return L / mpmath.log(L) ** mpf(alpha)


# ---------------------------------------------------------------------------
# Abelian transfer
# ---------------------------------------------------------------------------

def abelian_transfer(alpha, ell, z, pc: PrecisionContext = None) -> mpf:
    """Gamma(alpha + 1) / (1 - z)^{alpha + 1} * l(1 / (1 - z))"""
    pc = pc or PrecisionContext()
    if isinstance(ell, str):
        try:
            ell = SlowlyVarying.parse(ell)
        except ValueError as e:
            raise UnsupportedFunctionError(str(e))
    with pc.workprec():
        alpha, z = mpf(alpha), mpf(z)
        if alpha <= 0:
            raise DomainError("alpha must be positive")
        if not 0 < z < 1:
            raise DomainError("z must lie in (0, 1)")
        x = 1 / (1 - z)
        if ell.m and x <= mpmath.e:
            raise DomainError("log log(1/(1-z)) must be positive for this slowly varying factor")
        return pc.round(hpnum.gamma(alpha + 1, pc).real * x ** (alpha + 1) * ell(x))


# ---------------------------------------------------------------------------
# Tau expansion
# ---------------------------------------------------------------------------

def tau_coefficient(n: int) -> Fraction:
    """B_{n+1}^2 / ((n+1)! (n+1))"""
    b = hpnum.bernoulli(n + 1)
    return b * b / (math.factorial(n + 1) * (n + 1))


def tau_expansion(t, K: int, pc: PrecisionContext,
                  source: MainTermSource = MainTermSource.RESIDUE_DERIVED) -> mpc:
    """
    (1/t) log(1/t) + gamma/t + sum_{n<K} s_n c_n t^n with c_n = tau_coefficient(n).
    Residue signs s_n = (-1)^n; the paper-literal form uses s_n = -1 throughout.
    """
    if K < 0:
        raise DomainError("K must be nonnegative")
    with pc.workprec():
        t = mpc(t)
        if t.real <= 0:
            raise DomainError("Re(t) must be positive")
        value = (-mpmath.log(t) + hpnum.euler_gamma(pc)) / t
        power = mpc(1)
        for n in range(K):
            c = tau_coefficient(n)
            sign = (-1) ** n if source == MainTermSource.RESIDUE_DERIVED else -1
            value += sign * mpf(c.numerator) / c.denominator * power
            power *= t
        return pc.round(value)


# ---------------------------------------------------------------------------
# Main terms
# ---------------------------------------------------------------------------

_NO_MAIN_TERM = {
    ArithFunctionId.MOBIUS,
    ArithFunctionId.MOBIUS_ALTERNATING,
    ArithFunctionId.LIOUVILLE,
    ArithFunctionId.LIOUVILLE_ALTERNATING,
}

MAIN_TERM_FORMS = {
    (ArithFunctionId.VON_MANGOLDT, MainTermSource.PAPER_LITERAL): "1/(1-z)",
    (ArithFunctionId.VON_MANGOLDT, MainTermSource.RESIDUE_DERIVED): "1/t",
    (ArithFunctionId.TWO_OMEGA, MainTermSource.PAPER_LITERAL):
        "(1/(1-z)) log(1/(1-z)) + (1+gamma)/(1-z)",
    (ArithFunctionId.TWO_OMEGA, MainTermSource.RESIDUE_DERIVED):
        "t^-1 [(log(1/t) + gamma)/zeta(2) - 2 zeta'(2)/zeta(2)^2]",
}


def main_term_form(fn_id: ArithFunctionId, source: MainTermSource) -> MainTermForm:
    if fn_id in _NO_MAIN_TERM:
        return MainTermForm(fn_id=fn_id, description="0", source=source)
    if (fn_id, source) not in MAIN_TERM_FORMS:
        raise UnsupportedFunctionError(f"no main term is defined for {fn_id.value}")
    return MainTermForm(fn_id=fn_id, description=MAIN_TERM_FORMS[(fn_id, source)], source=source)


def corollary_main_term(fn_id: ArithFunctionId, z, source: MainTermSource, pc: PrecisionContext) -> mpc:
    main_term_form(fn_id, source)
    with pc.workprec():
        z = mpc(z)
        if fn_id in _NO_MAIN_TERM:
            return mpc(0)
        if abs(z) >= 1:
            raise DomainError("|z| must be below 1")
        if source == MainTermSource.PAPER_LITERAL:
            x = 1 / (1 - z)
            if fn_id == ArithFunctionId.VON_MANGOLDT:
                return pc.round(x)
            return pc.round(x * mpmath.log(x) + (1 + hpnum.euler_gamma(pc)) * x)

        t = -mpmath.log(z)
        if fn_id == ArithFunctionId.VON_MANGOLDT:
            return pc.round(1 / t)
        zeta2 = hpnum.zeta(2, pc).real
        zeta2_prime = hpnum.zeta_prime(2, pc).real
        value = ((-mpmath.log(t) + hpnum.euler_gamma(pc)) / zeta2 - 2 * zeta2_prime / zeta2 ** 2) / t
        return pc.round(value)


def corollary_residual(fn_id: ArithFunctionId, z, source: MainTermSource, pc: PrecisionContext,
                       target_abs_err, memory_cap: int = None) -> mpc:
    """Direct sum minus the main term"""
    main = corollary_main_term(fn_id, z, source, pc)
    direct = series.eval_power_series(fn_id, z, pc, target_abs_err, memory_cap)
    with pc.workprec():
        return pc.round(direct.value - main)


def main_term_adjudication(t, pc: PrecisionContext, target_abs_err, memory_cap: int = None) -> dict:
    """Both 2^omega residuals at real t and the source the direct sum agrees with"""
    fn_id = ArithFunctionId.TWO_OMEGA
    with pc.workprec():
        z = mpmath.exp(-mpf(t))
    direct = series.eval_power_series(fn_id, z, pc, target_abs_err, memory_cap)
    report = {"t": mpf(t), "direct": direct.value.real}
    with pc.workprec():
        for source in MainTermSource:
            main = corollary_main_term(fn_id, z, source, pc)
            report[source.value] = {
                "main": main.real,
                "residual": (direct.value - main).real,
                "ratio": abs(direct.value - main) / abs(main),
            }
    report["verdict"] = min(MainTermSource, key=lambda s: abs(report[s.value]["residual"])).value
    logger.info("2^omega main term at t=%s: direct sum matches %s", t, report["verdict"])
    return report


def main_term_table(t_grid: list, pc: PrecisionContext, target_abs_err=1e-8,
                    memory_cap: int = None) -> ProbeTable:
    """main_term_adjudication over a t grid, t decreasing"""
    columns = ["t", "direct"]
    for source in MainTermSource:
        columns += [f"main[{source.value}]", f"residual[{source.value}]"]
    table = ProbeTable(name="main-term", columns=columns + ["verdict"],
                       notes={"fn": ArithFunctionId.TWO_OMEGA.value})
    for t in sorted((mpf(t) for t in t_grid), reverse=True):
        report = main_term_adjudication(t, pc, target_abs_err, memory_cap)
        row = [t, report["direct"]]
        for source in MainTermSource:
            row += [report[source.value]["main"], report[source.value]["residual"]]
        table.rows.append(row + [report["verdict"]])
    return table


# ---------------------------------------------------------------------------
# Probes
# ---------------------------------------------------------------------------

def _direct(fn_id: ArithFunctionId, t, pc: PrecisionContext, target_abs_err, memory_cap=None) -> mpf:
    point = EvalPoint.real(t, pc=pc)
    return series.eval_exp_series(fn_id, point, pc, target_abs_err, memory_cap).value.real


def fake_asymptotics_probe(t_grid: list, pc: PrecisionContext, target_abs_err=1e-10,
                           memory_cap: int = None) -> ProbeTable:
    """Rows (t, F_mu(t), F_mu(t) + 2, (F_mu(t) + 2) sqrt(t)), t decreasing"""
    table = ProbeTable(name="fake-asym", columns=["t", "F", "F+2", "(F+2)*sqrt(t)"])
    for t in sorted((mpf(t) for t in t_grid), reverse=True):
        if not 0 < t <= mpf("0.01"):
            raise DomainError(f"fake asymptotics probe takes t in (0, 1e-2], got {mpmath.nstr(t, 6)}")
        f = _direct(ArithFunctionId.MOBIUS, t, pc, target_abs_err, memory_cap)
        with pc.workprec():
            table.rows.append([t, f, f + 2, (f + 2) * mpmath.sqrt(t)])
    return table


def rh_window_probe(eta, z_grid: list, pc: PrecisionContext, target_abs_err=1e-10,
                    memory_cap: int = None) -> tuple:
    """
    Series side: (z, |F_mu(z)| (1-z)^eta). Mertens side: (x, |M(x)| / x^eta)
    at x = round(1 / (1 - z)), the matching scale.
    """
    eta = mpf(eta)
    if not mpf(0.5) <= eta <= 1:
        raise DomainError("eta must lie in [1/2, 1]")
    zs = [mpf(z) for z in z_grid]
    if any(not 0 < z < 1 for z in zs):
        raise DomainError("z grid must lie in (0, 1)")

    series_side = ProbeTable(name="rh-window-series", columns=["z", "|F(z)|*(1-z)^eta"],
                             notes={"eta": str(eta)})
    for z in zs:
        f = series.eval_power_series(ArithFunctionId.MOBIUS, z, pc, target_abs_err, memory_cap).value
        with pc.workprec():
            series_side.rows.append([z, abs(f) * (1 - z) ** eta])

    xs = [max(1, int(mpmath.nint(1 / (1 - z)))) for z in zs]
    table = arith.sieve(ArithFunctionId.MOBIUS, max(xs), prefix_sums=True, memory_cap=memory_cap)
    mertens_side = ProbeTable(name="rh-window-mertens", columns=["x", "|M(x)|/x^eta"],
                              notes={"eta": str(eta)})
    with pc.workprec():
        for x in xs:
            mertens_side.rows.append([mpf(x), abs(arith.mertens(table, x)) / mpf(x) ** eta])
    return series_side, mertens_side


def delange_probe(z_grid: list, pc: PrecisionContext, target_abs_err=1e-10,
                  memory_cap: int = None) -> ProbeTable:
    """Trajectory (z, F_mu(z), F_mu(z) sqrt(1-z))"""
    table = ProbeTable(name="delange", columns=["z", "F", "F*sqrt(1-z)"])
    for z in (mpf(z) for z in z_grid):
        f = series.eval_power_series(ArithFunctionId.MOBIUS, z, pc, target_abs_err, memory_cap).value.real
        with pc.workprec():
            table.rows.append([z, f, f * mpmath.sqrt(1 - z)])
    return table


def prime_abelian_probe(z_grid: list, pc: PrecisionContext, target_abs_err=1e-6,
                        memory_cap: int = None) -> ProbeTable:
    """(z, sum p_n z^n, (1-z)^-2 log(1/(1-z)), ratio)"""
    table = ProbeTable(name="prime-abelian", columns=["z", "direct", "abelian", "ratio"])
    ell = SlowlyVarying(k=1)
    for z in (mpf(z) for z in z_grid):
        direct = series.eval_power_series(ArithFunctionId.PRIME_SEQUENCE, z, pc, target_abs_err,
                                          memory_cap).value.real
        approx = abelian_transfer(1, ell, z, pc)
        with pc.workprec():
            table.rows.append([z, direct, approx, direct / approx])
    return table


def balance_report(t_grid: list, pc: PrecisionContext, alpha=2 / 3,
                   fn_id: ArithFunctionId = ArithFunctionId.MOBIUS, target_abs_err=1e-8) -> ProbeTable:
    """
    Per t: choose_T (clamped to the certified height), the three segment majorants
    and the log gap between the horizontal and arc majorants.
    """
    table = ProbeTable(
        name="balance",
        columns=["t", "T", "clamped", "kappa", "vert", "hor", "arc", "log_gap_hor_arc"],
    )
    region = mellin.default_region()
    for t in sorted((mpf(t) for t in t_grid), reverse=True):
        T = choose_T(t, alpha)
        clamped = T > SAFE_CONTOUR_HEIGHT
        if clamped:
            logger.info("choose_T(%s) = %s clamped to %s", mpmath.nstr(t, 6), mpmath.nstr(T, 6),
                        SAFE_CONTOUR_HEIGHT)
            T = mpf(SAFE_CONTOUR_HEIGHT)
        kappa = mellin.default_kappa(t)
        spec = ContourSpec(kappa=float(kappa), T=float(T), region=region,
                           quad=QuadControls(target_abs_err=target_abs_err))
        majorants, _ = mellin.segment_majorants(fn_id, EvalPoint.real(t, pc=pc), spec, pc)
        with mpmath.workprec(64):
            gap = abs(mpmath.log(majorants["hor"]) - mpmath.log(majorants["arc"]))
        table.rows.append([t, T, int(clamped), kappa, majorants["vert"], majorants["hor"],
                           majorants["arc"], gap])
    return table
