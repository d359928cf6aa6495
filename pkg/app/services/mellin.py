"""
F(t) as the inverse Mellin integral (1/2 pi i) int D(s) Gamma(s) t^{-s} ds.

The integral runs either along the vertical line Re(s) = kappa or along the
deformed path that leaves the line at height +-T, runs left to the arc
sigma = g(tau) and climbs it. Both are truncated at the height H where the
absolute Dirichlet bound times the Gamma majorant leaves less than the target.
Every straight piece is split into panels; mpmath's Gauss-Legendre rule raises
its degree per panel until successive degrees agree.
"""
import logging
import math
import time
from pathlib import Path

import mpmath
import yaml
from mpmath import mpc, mpf

from app.config import settings
from app.schemas.arith import ArithFunctionId
from app.schemas.contour import (
    SAFE_CONTOUR_HEIGHT,
    ContourSpec,
    DirichletClosedForm,
    MellinResult,
    QuadControls,
    ZeroFreeRegionSpec,
)
from app.schemas.numeric import EvalPoint, PrecisionContext, SeriesValue
from app.services import hpnum
from app.services.errors import (
    DomainError,
    PoleError,
    QuadratureError,
    RegionSafetyError,
    UnsupportedFunctionError,
    ZeroDivisionOnPathError,
)
from app.services.export import sci

logger = logging.getLogger(__name__)

# precision for majorants and truncation searches
BOUND_PC = PrecisionContext(bits=53, guard_bits=11)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

class DirichletRegistry:
    """Closed forms of D(s), loaded from the resource file"""

    def __init__(self, path: Path = None):
        self.forms = self._load_forms(path)

    def _load_forms(self, path: Path = None) -> dict:
        path = path or Path(__file__).parent.parent / "resources" / "dirichlet_forms.yaml"
        with open(path, "r") as f:
            raw = yaml.safe_load(f)
        return {
            ArithFunctionId(name): DirichletClosedForm(fn_id=name, **entry)
            for name, entry in raw.items()
        }

    def get(self, fn_id: ArithFunctionId) -> DirichletClosedForm:
        form = self.forms.get(fn_id)
        if form is None:
            raise UnsupportedFunctionError(f"{fn_id.value} has no closed-form Dirichlet series")
        return form


def _zeta_nonzero(s, pc: PrecisionContext) -> mpc:
    value = hpnum.zeta(s, pc)
    if abs(value) < mpf(2) ** (-(pc.bits // 2)):
        raise ZeroDivisionOnPathError(f"zeta vanishes at s = {mpmath.nstr(s, 12)}")
    return value


def _two_power(s) -> mpc:
    return mpmath.power(2, s)


def _mobius(s, pc):
    return 1 / _zeta_nonzero(s, pc)


def _mobius_alt(s, pc):
    two_s = _two_power(s)
    if two_s == 1:
        raise PoleError(f"2^s = 1 at s = {mpmath.nstr(s, 12)}")
    return (two_s + 1) / ((two_s - 1) * _zeta_nonzero(s, pc))


def _liouville(s, pc):
    return hpnum.zeta(2 * s, pc) / _zeta_nonzero(s, pc)


def _liouville_alt(s, pc):
    return (1 + _two_power(1 - s)) * hpnum.zeta(2 * s, pc) / _zeta_nonzero(s, pc)


def _von_mangoldt(s, pc):
    return -hpnum.zeta_prime(s, pc) / _zeta_nonzero(s, pc)


def _von_mangoldt_minus_one(s, pc):
    z = _zeta_nonzero(s, pc)
    return -hpnum.zeta_prime(s, pc) / z - z


def _tau(s, pc):
    return hpnum.zeta(s, pc) ** 2


def _two_omega(s, pc):
    return hpnum.zeta(s, pc) ** 2 / _zeta_nonzero(2 * s, pc)


def _two_omega_minus_tau(s, pc):
    z2 = hpnum.zeta(s, pc) ** 2
    return z2 / _zeta_nonzero(2 * s, pc) - z2


_CLOSED_FORMS = {
    ArithFunctionId.MOBIUS: _mobius,
    ArithFunctionId.MOBIUS_ALTERNATING: _mobius_alt,
    ArithFunctionId.LIOUVILLE: _liouville,
    ArithFunctionId.LIOUVILLE_ALTERNATING: _liouville_alt,
    ArithFunctionId.VON_MANGOLDT: _von_mangoldt,
    ArithFunctionId.VON_MANGOLDT_MINUS_ONE: _von_mangoldt_minus_one,
    ArithFunctionId.TAU_DIVISORS: _tau,
    ArithFunctionId.TWO_OMEGA: _two_omega,
    ArithFunctionId.TWO_OMEGA_MINUS_TAU: _two_omega_minus_tau,
}

_HAS_ZETA_2S = {
    ArithFunctionId.LIOUVILLE,
    ArithFunctionId.LIOUVILLE_ALTERNATING,
    ArithFunctionId.TWO_OMEGA,
    ArithFunctionId.TWO_OMEGA_MINUS_TAU,
}


def _value_at_one(fn_id: ArithFunctionId, pc: PrecisionContext) -> mpf:
    """Removable singularities at s = 1 of the pole-free forms"""
    if fn_id == ArithFunctionId.VON_MANGOLDT_MINUS_ONE:
        # -zeta'/zeta = 1/(s-1) - gamma + ..., zeta = 1/(s-1) + gamma + ...
        return -2 * hpnum.euler_gamma(pc)
    return mpf(0)


def dirichlet_D(fn_id: ArithFunctionId, s, pc: PrecisionContext) -> mpc:
    """D(s) = sum a_n n^-s through its closed form in zeta and zeta'"""
    form = registry.get(fn_id)
    with pc.workprec():
        s = mpc(s)
        if s == 1:
            if not form.analytic_in_region:
                raise PoleError(f"{form.formula} has a pole at s = 1")
            return pc.round(mpc(_value_at_one(fn_id, pc)))
        if fn_id in _HAS_ZETA_2S and s == mpf(0.5):
            raise PoleError(f"zeta(2s) in {form.formula} has a pole at s = 1/2")
        return pc.round(_CLOSED_FORMS[fn_id](s, pc))


def dirichlet_abs_bound(fn_id: ArithFunctionId, kappa, pc: PrecisionContext) -> mpf:
    """sum |a_n| n^-kappa for kappa > 1, an upper bound for |D| on Re(s) = kappa"""
    form = registry.get(fn_id)
    with pc.workprec():
        kappa = mpf(kappa)
        if kappa <= 1:
            raise DomainError(f"the absolute bound needs kappa > 1, got {mpmath.nstr(kappa, 8)}")
        z = hpnum.zeta(kappa, pc).real
        recipes = {
            "zeta": lambda: z,
            "zeta_squared": lambda: z ** 2,
            "zeta_over_zeta2": lambda: z / hpnum.zeta(2 * kappa, pc).real,
            "zeta_squared_over_zeta2": lambda: z ** 2 / hpnum.zeta(2 * kappa, pc).real,
            "log_derivative": lambda: -hpnum.zeta_prime(kappa, pc).real / z,
            "log_derivative_plus_zeta": lambda: -hpnum.zeta_prime(kappa, pc).real / z + z,
        }
        if form.abs_bound not in recipes:
            raise UnsupportedFunctionError(f"unknown absolute-bound recipe {form.abs_bound!r}")
        return pc.round(recipes[form.abs_bound]())


# ---------------------------------------------------------------------------
# Path geometry
# ---------------------------------------------------------------------------

def g_of_tau(region: ZeroFreeRegionSpec, tau) -> mpf:
    return region.g(tau)


def default_kappa(t) -> mpf:
    """1 + 1/log(1/|t|); 2 once |t| >= 1/e"""
    r = abs(mpc(t))
    if r >= mpmath.exp(-1):
        return mpf(2)
    return 1 + 1 / mpmath.log(1 / r)


def default_region() -> ZeroFreeRegionSpec:
    return ZeroFreeRegionSpec(
        alpha=settings.region_alpha,
        beta=settings.region_beta,
        b=settings.region_b,
        w=settings.region_w,
    )


def _panel_width(log_t: mpc, controls: QuadControls) -> float:
    """One period of t^{-i tau}, kept within [1, 8]"""
    if controls.panel_width is not None:
        return controls.panel_width
    freq = abs(float(log_t.real))
    if freq == 0:
        return 8.0
    return min(max(2 * math.pi / freq, 1.0), 8.0)


def _split(a: mpc, b: mpc, width: float) -> list:
    count = max(1, int(math.ceil(float(abs(b - a)) / width)))
    return [a + (b - a) * k / count for k in range(count + 1)]


def _polyline(corners: list, width: float) -> list:
    points = [corners[0]]
    for a, b in zip(corners, corners[1:]):
        points.extend(_split(a, b, width)[1:])
    return points


def _quad_pc(target_abs_err, pc: PrecisionContext) -> PrecisionContext:
    """Integrand precision matched to the target, never above the requested bits"""
    bits = int(math.ceil(-math.log2(float(target_abs_err)))) + 16
    return PrecisionContext(bits=min(max(bits, 53), pc.bits), guard_bits=pc.guard_bits)


# ---------------------------------------------------------------------------
# Integrand and truncation
# ---------------------------------------------------------------------------

def integrand(fn_id: ArithFunctionId, s, log_t: mpc, pc: PrecisionContext) -> mpc:
    """D(s) Gamma(s) t^{-s}, t^{-s} = exp(-s Log t) on the principal branch"""
    s = mpc(s)
    return dirichlet_D(fn_id, s, pc) * hpnum.gamma(s, pc) * mpmath.exp(-s * log_t)


def _ray_majorant(c, nu, sigma, log_t: mpc, tau) -> mpf:
    """c (1+|tau|)^nu |Gamma(s)|-majorant |t^{-s}| at s = sigma + i tau"""
    s = mpc(sigma, tau)
    return (c * (1 + abs(tau)) ** nu * hpnum.gamma_majorant(s, BOUND_PC)
            * mpmath.exp(-sigma * log_t.real + tau * log_t.imag))


def _vertical_tail(c, nu, kappa, log_t: mpc, height) -> mpf:
    """(1/2 pi) int_{|tau| >= height} of the ray majorant at Re(s) = kappa"""
    with mpmath.workprec(BOUND_PC.work_bits):
        upper = mpmath.quad(lambda tau: _ray_majorant(c, nu, kappa, log_t, tau), [height, mpmath.inf])
        lower = mpmath.quad(lambda tau: _ray_majorant(c, nu, kappa, log_t, -tau), [height, mpmath.inf])
        return (upper + lower) / (2 * mpmath.pi)


def truncation_height(fn_id: ArithFunctionId, kappa, log_t: mpc, target, start=0) -> tuple:
    """(H, tail) with the integral beyond +-H bounded by target / 4 (nu = 0 absolute bound)"""
    with mpmath.workprec(BOUND_PC.work_bits):
        c = dirichlet_abs_bound(fn_id, kappa, BOUND_PC)
        height = max(mpf(start), mpf(8))
        tail = _vertical_tail(c, 0, kappa, log_t, height)
        while tail > mpf(target) / 4:
            height *= mpf(1.25)
            tail = _vertical_tail(c, 0, kappa, log_t, height)
            if height > hpnum.ZETA_IM_LIMIT / 2:
                raise DomainError("t too close to the imaginary axis: no truncation height found")
        logger.debug("truncation height H=%s, tail=%s", mpmath.nstr(height, 6), mpmath.nstr(tail, 4))
        return height, tail


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

class _PathIntegrator:
    """Integrates f(s) ds over polylines and the curved arc with shared controls"""

    def __init__(self, fn_id, log_t, qpc: PrecisionContext, controls: QuadControls, width: float):
        self.fn_id = fn_id
        self.log_t = log_t
        self.qpc = qpc
        self.controls = controls
        self.width = width
        self.panels = 0

    def f(self, s):
        return integrand(self.fn_id, s, self.log_t, self.qpc)

    def _quad(self, func, points, budget):
        width = self.width
        for attempt in range(self.controls.max_subdivisions + 1):
            with mpmath.workprec(self.qpc.bits):
                value, err = mpmath.quad(func, points(width), method="gauss-legendre",
                                         error=True, maxdegree=self.controls.max_degree)
            if err <= budget:
                self.panels += len(points(width)) - 1
                return value, err
            logger.info("panel refinement %d: err=%s > %s", attempt + 1,
                        mpmath.nstr(err, 4), mpmath.nstr(budget, 4))
            width /= 2
        raise QuadratureError(
            f"quadrature did not reach {mpmath.nstr(budget, 4)} after "
            f"{self.controls.max_subdivisions} subdivisions (last estimate {mpmath.nstr(err, 4)})"
        )

    def polyline(self, corners: list, budget) -> tuple:
        return self._quad(self.f, lambda width: _polyline(corners, width), budget)

    def arc(self, region: ZeroFreeRegionSpec, tau_a, tau_b, budget) -> tuple:
        """int f(s) ds over s = g(tau) + i tau, tau from tau_a to tau_b"""
        def along(tau):
            return self.f(mpc(region.g(tau), tau)) * mpc(region.g_prime(tau), 1)

        def points(width):
            return [mpf(p.real) for p in _split(mpc(tau_a), mpc(tau_b), width)]

        return self._quad(along, points, budget)


def _division(value: mpc) -> mpc:
    return value / (2j * mpmath.pi)


def inverse_mellin_line(fn_id: ArithFunctionId, point: EvalPoint, kappa, pc: PrecisionContext,
                        target_abs_err, controls: QuadControls = None) -> MellinResult:
    """(1/2 pi i) int_{kappa - i inf}^{kappa + i inf} D(s) Gamma(s) t^{-s} ds"""
    controls = controls or QuadControls(max_degree=settings.quad_max_degree, target_abs_err=target_abs_err)
    started = time.perf_counter()
    registry.get(fn_id)
    kappa = mpf(kappa)
    if kappa <= 1:
        raise DomainError(f"kappa must exceed 1, got {mpmath.nstr(kappa, 8)}")

    with pc.workprec():
        log_t = mpmath.log(point.t)
    height, tail = truncation_height(fn_id, kappa, log_t, target_abs_err)
    qpc = _quad_pc(target_abs_err, pc)
    integrator = _PathIntegrator(fn_id, log_t, qpc, controls, _panel_width(log_t, controls))
    corners = [mpc(kappa, -height), mpc(kappa, 0), mpc(kappa, height)]
    total, err = integrator.polyline(corners, mpf(target_abs_err) / 2 * 2 * mpmath.pi)

    with pc.workprec():
        value = _division(total)
        result = SeriesValue(
            value=pc.round(value),
            tail_bound=tail,
            terms_used=integrator.panels,
            rounding_slack=err / (2 * mpmath.pi),
            wall_notes={"quad_bits": qpc.bits, "seconds": time.perf_counter() - started},
        )
    logger.info("line integral %s at t=%s: H=%s, %d panels", fn_id.value,
                mpmath.nstr(point.t, 8), mpmath.nstr(height, 6), integrator.panels)
    return MellinResult(fn_id=fn_id, t=point.t, contour="line", kappa=kappa, height=height, result=result)


def _check_deformable(fn_id: ArithFunctionId, spec: ContourSpec):
    form = registry.get(fn_id)
    if not form.analytic_in_region:
        raise UnsupportedFunctionError(
            f"{form.formula} is not analytic on sigma >= g(tau); use the line contour"
        )
    if spec.T > SAFE_CONTOUR_HEIGHT and not (spec.unsafe_override or settings.unsafe_tall_contour):
        raise RegionSafetyError(
            f"T = {spec.T} exceeds {SAFE_CONTOUR_HEIGHT}, the height below which the region is "
            f"certified zero-free; pass the unsafe override to continue"
        )


def inverse_mellin_deformed(fn_id: ArithFunctionId, point: EvalPoint, spec: ContourSpec,
                            pc: PrecisionContext, target_abs_err) -> MellinResult:
    """The same integral along rays, horizontals and the arc sigma = g(tau)"""
    _check_deformable(fn_id, spec)
    started = time.perf_counter()
    region, kappa, T = spec.region, mpf(spec.kappa), mpf(spec.T)
    with pc.workprec():
        log_t = mpmath.log(point.t)
    height, tail = truncation_height(fn_id, kappa, log_t, target_abs_err, start=T)
    qpc = _quad_pc(target_abs_err, pc)
    integrator = _PathIntegrator(fn_id, log_t, qpc, spec.quad, _panel_width(log_t, spec.quad))
    budget = mpf(target_abs_err) / 8 * 2 * mpmath.pi

    g_T = region.g(T)
    vert_up, e1 = integrator.polyline([mpc(kappa, T), mpc(kappa, height)], budget)
    vert_down, e2 = integrator.polyline([mpc(kappa, -height), mpc(kappa, -T)], budget)
    hor_down, e3 = integrator.polyline([mpc(kappa, -T), mpc(g_T, -T)], budget)
    hor_up, e4 = integrator.polyline([mpc(g_T, T), mpc(kappa, T)], budget)

    w = mpf(region.w)
    if T <= w:
        arc, e5 = integrator.polyline([mpc(g_T, -T), mpc(g_T, T)], budget)
    else:
        g_w = region.g(w)
        low, ea = integrator.arc(region, -T, -w, budget)
        mid, eb = integrator.polyline([mpc(g_w, -w), mpc(g_w, w)], budget)
        high, ec = integrator.arc(region, w, T, budget)
        arc, e5 = low + mid + high, ea + eb + ec

    with pc.workprec():
        segments = {
            "vert": _division(vert_up + vert_down),
            "hor": _division(hor_up + hor_down),
            "arc": _division(arc),
        }
        total = segments["vert"] + segments["hor"] + segments["arc"]
        quad_err = (e1 + e2 + e3 + e4 + e5) / (2 * mpmath.pi)
        result = SeriesValue(
            value=pc.round(total),
            tail_bound=tail,
            terms_used=integrator.panels,
            rounding_slack=quad_err,
            wall_notes={"quad_bits": qpc.bits, "seconds": time.perf_counter() - started},
        )
    majorants, c_d = segment_majorants(fn_id, point, spec, pc, height=height)
    return MellinResult(
        fn_id=fn_id, t=point.t, contour="deformed", kappa=kappa, T=T, height=height,
        result=result, segments={k: pc.round(v) for k, v in segments.items()},
        majorants=majorants, c_d=c_d,
    )


# ---------------------------------------------------------------------------
# Segment majorants
# ---------------------------------------------------------------------------

def contour_samples(spec: ContourSpec, height, count: int = 16) -> list:
    """Sample points on every piece of the deformed path"""
    region, kappa, T = spec.region, mpf(spec.kappa), mpf(spec.T)
    g_T = region.g(T)
    points = []
    for k in range(count + 1):
        frac = mpf(k) / count
        tau = T + (mpf(height) - T) * frac
        points += [mpc(kappa, tau), mpc(kappa, -tau)]
        sigma = g_T + (kappa - g_T) * frac
        points += [mpc(sigma, T), mpc(sigma, -T)]
    for k in range(2 * count + 1):
        tau = -T + 2 * T * k / (2 * count)
        points.append(mpc(region.g(tau), tau))
    return points


def line_samples(kappa, height, count: int = 32) -> list:
    return [mpc(kappa, mpf(height) * k / count) for k in range(-count, count + 1)]


def integrand_majorant(c_d, nu, s, log_t: mpc) -> mpf:
    """C_D (1+|tau|)^nu |Gamma|-majorant |t^{-s}| at one point s"""
    s = mpc(s)
    with mpmath.workprec(BOUND_PC.work_bits):
        return _ray_majorant(c_d, nu, s.real, log_t, s.imag)


def path_samples(fn_id: ArithFunctionId, point: EvalPoint, pc: PrecisionContext, kappa, height,
                 spec: ContourSpec = None, nu=None, count: int = 16) -> tuple:
    """
    (C_D, rows) with |D(s) Gamma(s) t^{-s}| and its majorant at sample points of
    the vertical line (spec None) or of the deformed path.
    """
    nu = registry.get(fn_id).nu if nu is None else nu
    if spec is None:
        points = line_samples(kappa, height, 2 * count)
    else:
        _check_deformable(fn_id, spec)
        points = contour_samples(spec, height, count)
    c_d = calibrate_CD(fn_id, points, nu)
    with pc.workprec():
        log_t = mpmath.log(point.t)
        rows = [
            {"s": mpc(s), "integrand_abs": abs(integrand(fn_id, s, log_t, pc)),
             "majorant": integrand_majorant(c_d, nu, s, log_t)}
            for s in points
        ]
    return c_d, rows


def calibrate_CD(fn_id: ArithFunctionId, points: list, nu=None, pc: PrecisionContext = None,
                 safety=None) -> mpf:
    """safety * max |D(s)| / (1 + |tau|)^nu over the sample points"""
    nu = settings.nu if nu is None else nu
    safety = settings.cd_safety if safety is None else safety
    pc = pc or PrecisionContext(bits=64, guard_bits=16)
    with pc.workprec():
        peak = max(abs(dirichlet_D(fn_id, s, pc)) / (1 + abs(s.imag)) ** nu for s in points)
        c_d = safety * peak
    logger.info("C_D(%s, nu=%s) = %s over %d samples", fn_id.value, nu, mpmath.nstr(c_d, 6), len(points))
    return c_d


def segment_majorants(fn_id: ArithFunctionId, point: EvalPoint, spec: ContourSpec,
                      pc: PrecisionContext, height=None, nu=None) -> tuple:
    """({vert, hor, arc} majorants, C_D) for the deformed path"""
    _check_deformable(fn_id, spec)
    nu = registry.get(fn_id).nu if nu is None else nu
    region, kappa, T = spec.region, mpf(spec.kappa), mpf(spec.T)
    with pc.workprec():
        log_t = mpmath.log(point.t)
    if height is None:
        height, _ = truncation_height(fn_id, kappa, log_t, spec.quad.target_abs_err, start=T)
    c_d = calibrate_CD(fn_id, contour_samples(spec, height), nu)

    with mpmath.workprec(BOUND_PC.work_bits):
        two_pi = 2 * mpmath.pi
        g_T = region.g(T)
        # above H only the absolute bound is known
        c_vert = max(c_d, dirichlet_abs_bound(fn_id, kappa, BOUND_PC) / (1 + T) ** nu)
        vert = _vertical_tail(c_vert, nu, kappa, log_t, T)
        hor = sum(
            mpmath.quad(lambda sigma: _ray_majorant(c_d, nu, sigma, log_t, tau), [g_T, kappa])
            for tau in (T, -T)
        ) / two_pi

        def arc_majorant(tau):
            return _ray_majorant(c_d, nu, region.g(tau), log_t, tau) * abs(mpc(region.g_prime(tau), 1))

        breaks = sorted({-T, T, *([-mpf(region.w), mpf(region.w)] if T > region.w else []), mpf(0)})
        arc = mpmath.quad(arc_majorant, breaks) / two_pi
    return {"vert": vert, "hor": hor, "arc": arc}, c_d


def bound_segment(which: str, fn_id: ArithFunctionId, point: EvalPoint, spec: ContourSpec,
                  pc: PrecisionContext) -> mpf:
    """Explicit majorant of one path segment: vert, hor or arc"""
    if which not in ("vert", "hor", "arc"):
        raise DomainError(f"unknown segment {which!r}; expected vert, hor or arc")
    majorants, _ = segment_majorants(fn_id, point, spec, pc)
    return majorants[which]


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

def _complex_json(x, pc: PrecisionContext) -> dict:
    x = mpc(x)
    return {"re": sci(x.real, pc), "im": sci(x.imag, pc)}


def mellin_result(result: MellinResult, pc: PrecisionContext) -> dict:
    """The JSON result object of one contour evaluation"""
    return {
        "fn": result.fn_id.value,
        "t": _complex_json(result.t, pc),
        "contour": result.contour,
        "kappa": sci(result.kappa, pc),
        "T": None if result.T is None else sci(result.T, pc),
        "height": sci(result.height, pc),
        "value": _complex_json(result.value, pc),
        "segments": {k: _complex_json(v, pc) for k, v in result.segments.items()},
        "majorants": {k: sci(v, pc) for k, v in result.majorants.items()},
        "c_d": None if result.c_d is None else sci(result.c_d, pc),
        "quad_error_budget": sci(result.quad_error_budget, pc),
        "panels": result.result.terms_used,
        # integrands are evaluated at the bits the target needs, at most the requested ones
        "precision_bits": int(result.result.wall_notes.get("quad_bits", pc.bits)),
        "requested_bits": pc.bits,
    }


def samples_document(fn_id: ArithFunctionId, contour: str, c_d, nu, rows: list, pc: PrecisionContext) -> dict:
    return {
        "fn": fn_id.value,
        "contour": contour,
        "c_d": sci(c_d, pc),
        "nu": nu,
        "samples": [
            {"s": _complex_json(row["s"], pc),
             "integrand_abs": sci(row["integrand_abs"], pc),
             "majorant": sci(row["majorant"], pc)}
            for row in rows
        ],
    }


# Create singleton instance
registry = DirichletRegistry()
