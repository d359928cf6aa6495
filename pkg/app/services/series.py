"""
Direct evaluation of F(t) = sum a_n e^{-nt} = sum a_n z^n.

Powers z^n and the running sum are kept as fixed-point Python integers at a
precision that covers the working bits plus the rounding drift of N
multiplications, so the additions are exact and the result does not depend on
the order in which segments are combined. Zero coefficients are skipped by
multiplying with precomputed powers z^g for the gap g.
"""
import logging
import time

import mpmath
import numpy as np
from mpmath import mpc, mpf

from app.config import settings
from app.schemas.arith import ArithFunctionId
from app.schemas.numeric import EvalPoint, PrecisionContext, SeriesValue
from app.services import arith
from app.services.errors import DomainError, LimitOverflowError
from app.services.export import sci

logger = logging.getLogger(__name__)

MAX_GAP = 64


# ---------------------------------------------------------------------------
# Tail majorants
# ---------------------------------------------------------------------------

def growth_tail(fn_id: ArithFunctionId, n_terms: int, r) -> mpf:
    """
    Upper bound for sum_{n > N} |a_n| e^{-n r}.
    |a_n| <= n for every function but the primes, where p_n <= n (log n + log log n).
    """
    r = mpf(r)
    q = mpmath.exp(-r)
    if fn_id == ArithFunctionId.PRIME_SEQUENCE:
        def f(n):
            return n * (mpmath.log(n) + mpmath.log(mpmath.log(n)))
        n_terms = max(n_terms, 6)
        ratio = q * f(n_terms + 2) / f(n_terms + 1)
        if ratio >= 1:
            return mpmath.inf
        return f(n_terms + 1) * q ** (n_terms + 1) / (1 - ratio)
    return (n_terms + 1) * q ** n_terms * (1 + 1 / r) / (1 - q)


def derivative_bound(fn_id: ArithFunctionId, r) -> mpf:
    """
    Upper bound for |F'(t)| <= sum n |a_n| e^{-n r}.
    Uses |a_n| <= n, and p_n <= 2 n^2 for the primes.
    """
    q = mpmath.exp(-mpf(r))
    if fn_id == ArithFunctionId.PRIME_SEQUENCE:
        return 2 * q * (1 + 4 * q + q * q) / (1 - q) ** 4
    return q * (1 + q) / (1 - q) ** 3


def input_rounding(fn_id: ArithFunctionId, point: EvalPoint, pc: PrecisionContext) -> mpf:
    """|F'(t)| times the rounding error of t, for points built below the working precision"""
    if point.input_bits >= pc.work_bits:
        return mpf(0)
    with pc.workprec():
        delta = abs(point.t) * mpf(2) ** (1 - point.input_bits)
        return derivative_bound(fn_id, point.t.real) * delta


def required_terms(fn_id: ArithFunctionId, r, target_abs_err) -> int:
    """Smallest N with growth_tail(N) <= target / 2"""
    with mpmath.workprec(64):
        target = mpf(target_abs_err) / 2
        hi = 1
        while growth_tail(fn_id, hi, r) > target:
            hi *= 2
        lo = hi // 2
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if growth_tail(fn_id, mid, r) > target:
                lo = mid
            else:
                hi = mid
        if fn_id == ArithFunctionId.PRIME_SEQUENCE:
            hi = max(hi, 6)
        return hi


# ---------------------------------------------------------------------------
# Fixed-point summation
# ---------------------------------------------------------------------------

def _to_fixed(x: mpf, prec: int) -> int:
    return int(mpmath.floor(mpmath.ldexp(x, prec)))


class _FixedPointSum:
    """Running sum of a_n z^n with z^n and the sum held as scaled integers"""

    def __init__(self, z: mpc, prec: int):
        self.prec = prec
        self.real = z.imag == 0
        zr, zi = _to_fixed(z.real, prec), _to_fixed(z.imag, prec)
        # powers z^g, g = 0..MAX_GAP
        self.pows = [(1 << prec, 0)]
        for _ in range(MAX_GAP):
            pr, pi = self.pows[-1]
            self.pows.append(((pr * zr - pi * zi) >> prec, (pr * zi + pi * zr) >> prec))
        self.zn = (1 << prec, 0)
        self.last = 0
        self.acc = [0, 0]
        self.terms = 0

    def add(self, indices, coeffs, coeff_shift: int = 0):
        """Add sum a_n z^n over increasing indices; coefficients scaled by 2^coeff_shift"""
        prec = self.prec
        pows = self.pows
        big_r, big_i = pows[MAX_GAP]
        zr, zi = self.zn
        last = self.last
        acc_r, acc_i = self.acc
        if self.real:
            for n, a in zip(indices, coeffs):
                g = n - last
                while g > MAX_GAP:
                    zr = (zr * big_r) >> prec
                    g -= MAX_GAP
                zr = (zr * pows[g][0]) >> prec
                acc_r += (a * zr) >> coeff_shift
                last = n
        else:
            for n, a in zip(indices, coeffs):
                g = n - last
                while g > MAX_GAP:
                    zr, zi = (zr * big_r - zi * big_i) >> prec, (zr * big_i + zi * big_r) >> prec
                    g -= MAX_GAP
                pr, pi = pows[g]
                zr, zi = (zr * pr - zi * pi) >> prec, (zr * pi + zi * pr) >> prec
                acc_r += (a * zr) >> coeff_shift
                acc_i += (a * zi) >> coeff_shift
                last = n
        self.terms += len(indices)
        self.zn = (zr, zi)
        self.last = last
        self.acc = [acc_r, acc_i]

    def value(self) -> mpc:
        return mpc(mpmath.ldexp(self.acc[0], -self.prec), mpmath.ldexp(self.acc[1], -self.prec))


def _segment_terms(fn_id: ArithFunctionId, lo: int, values, exponents, prec: int, log_cache: dict):
    """(indices, integer coefficients, shift) for the nonzero terms of one segment"""
    if exponents is None:
        nz = np.flatnonzero(values)
        return (nz + lo).tolist(), values[nz].astype(np.int64).tolist(), 0

    offset = -1 if fn_id == ArithFunctionId.VON_MANGOLDT_MINUS_ONE else 0
    one = 1 << prec
    coeffs = []
    if offset:
        # every n contributes (Lambda(n) - 1)
        indices = list(range(lo, lo + len(values)))
        for p in values.tolist():
            coeffs.append(_log_fixed(p, prec, log_cache) - one if p else -one)
        return indices, coeffs, prec

    nz = np.flatnonzero(values)
    for p in values[nz].tolist():
        coeffs.append(_log_fixed(p, prec, log_cache))
    return (nz + lo).tolist(), coeffs, prec


def _log_fixed(p: int, prec: int, cache: dict) -> int:
    fixed = cache.get(p)
    if fixed is None:
        fixed = _to_fixed(mpmath.log(p), prec)
        cache[p] = fixed
    return fixed


def _sum_series(fn_id: ArithFunctionId, z: mpc, r, pc: PrecisionContext, target_abs_err,
                memory_cap: int = None) -> SeriesValue:
    memory_cap = settings.memory_cap if memory_cap is None else memory_cap
    started = time.perf_counter()

    n_terms = required_terms(fn_id, r, target_abs_err)
    if n_terms > memory_cap:
        raise LimitOverflowError(n_terms, memory_cap, "series")
    logger.info("summing %s: Re(t)=%s, N=%d", fn_id.value, mpmath.nstr(r, 6), n_terms)

    # rounding drift grows at most like N^3 ulps
    prec = pc.work_bits + 3 * n_terms.bit_length() + 4
    segments = 0
    with mpmath.workprec(prec):
        acc = _FixedPointSum(mpc(z), prec)
        log_cache = {}
        for lo, values, exponents in arith.iter_segments(fn_id, n_terms):
            indices, coeffs, shift = _segment_terms(fn_id, lo, values, exponents, prec, log_cache)
            acc.add(indices, coeffs, shift)
            segments += 1
        total = acc.value()

    with pc.workprec():
        tail = growth_tail(fn_id, n_terms, r)
        slack = mpf(n_terms) ** 3 * mpf(2) ** (-prec + 2)
    return SeriesValue(
        value=pc.round(total),
        tail_bound=tail,
        terms_used=n_terms,
        rounding_slack=slack,
        wall_notes={
            "segments": segments,
            "nonzero_terms": acc.terms,
            "fixed_point_bits": prec,
            "seconds": time.perf_counter() - started,
        },
    )


def eval_exp_series(fn_id: ArithFunctionId, point: EvalPoint, pc: PrecisionContext,
                    target_abs_err, memory_cap: int = None) -> SeriesValue:
    """F(t) = sum a_n e^{-nt}, truncated where the growth majorant drops below the target"""
    if mpf(target_abs_err) <= 0:
        raise DomainError("target_abs_err must be positive")
    with pc.workprec():
        t = mpc(point.t)
        if t.real <= 0:
            raise DomainError("Re(t) must be positive")
    with mpmath.workprec(pc.work_bits + 64):
        z = mpmath.exp(-t)
    result = _sum_series(fn_id, z, t.real, pc, target_abs_err, memory_cap)
    drift = input_rounding(fn_id, point, pc)
    if drift > 0:
        logger.warning("t carries %d bits against %d working bits; error budget widened by %s",
                       point.input_bits, pc.work_bits, mpmath.nstr(drift, 3))
        result = result.model_copy(update={"input_rounding": drift})
    return result


def eval_power_series(fn_id: ArithFunctionId, z, pc: PrecisionContext, target_abs_err,
                      memory_cap: int = None) -> SeriesValue:
    """sum a_n z^n for |z| < 1, through t = -log z on the principal branch"""
    with pc.workprec():
        z = mpc(z)
        if z == 0:
            return SeriesValue(value=mpc(0), tail_bound=mpf(0), terms_used=0)
        if z.imag == 0 and z.real < 0:
            raise DomainError("z on the negative real axis is outside the principal branch")
        if abs(z) >= 1:
            raise DomainError(f"|z| must be below 1, got {mpmath.nstr(abs(z), 10)}")
        t = -mpmath.log(z)
    return _sum_series(fn_id, z, t.real, pc, target_abs_err, memory_cap)


def sector_check(z, theta) -> bool:
    """True iff |arg(1 - z)| <= pi/2 - theta"""
    z = mpc(z)
    return bool(abs(mpmath.arg(1 - z)) <= mpmath.pi / 2 - mpf(theta))


def lambert_tau(z, pc: PrecisionContext, target_abs_err) -> SeriesValue:
    """sum z^n / (1 - z^n), the Lambert form of sum tau(n) z^n"""
    with pc.workprec():
        z = mpc(z)
        q = abs(z)
        if q >= 1:
            raise DomainError("|z| must be below 1")
        # tail <= q^{N+1} / (1 - q)^2
        target = mpf(target_abs_err) / 2
        n_terms = max(1, int(mpmath.ceil(mpmath.log(target * (1 - q) ** 2) / mpmath.log(q))))
        total = mpc(0)
        zn = mpc(1)
        for _ in range(n_terms):
            zn *= z
            total += zn / (1 - zn)
        tail = q ** (n_terms + 1) / (1 - q) ** 2
    return SeriesValue(value=pc.round(total), tail_bound=tail, terms_used=n_terms)


def series_result(fn_id: ArithFunctionId, point: EvalPoint, result: SeriesValue, pc: PrecisionContext) -> dict:
    """The JSON result object of one evaluation"""
    return {
        "fn": fn_id.value,
        "t_re": sci(point.t.real, pc),
        "t_im": sci(point.t.imag, pc),
        "value_re": sci(result.value.real, pc),
        "value_im": sci(result.value.imag, pc),
        "tail_bound": sci(result.tail_bound, pc),
        "rounding_slack": sci(result.rounding_slack, pc),
        "input_rounding": sci(result.input_rounding, pc),
        "terms_used": result.terms_used,
        "precision_bits": pc.bits,
    }
