"""
High-precision special functions on top of mpmath numbers.

Gamma uses the Stirling series after an upward shift; zeta and zeta' use
Euler-Maclaurin summation whose cutoffs (N direct terms, M correction terms)
are doubled until the first omitted correction is below the working epsilon.
Every entry point takes a PrecisionContext and evaluates at bits + guard_bits.
"""
import logging
import math
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mpc, mpf

from app.config import settings
from app.schemas.numeric import PrecisionContext
from app.services.errors import DomainError, PoleError, RangeError

logger = logging.getLogger(__name__)

ZETA_IM_LIMIT = 10 ** 4
ZETA_RE_MIN = -1


# ---------------------------------------------------------------------------
# Bernoulli numbers
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_table(cap: int) -> tuple:
    """B_0..B_cap from sum_{k<=m} C(m+1, k) B_k = 0 (so B_1 = -1/2)"""
    table = [Fraction(1)]
    for m in range(1, cap + 1):
        acc = sum(math.comb(m + 1, k) * table[k] for k in range(m))
        table.append(-acc / (m + 1))
    return tuple(table)


def bernoulli(n: int, cap: int = None) -> Fraction:
    """Exact Bernoulli number B_n"""
    cap = settings.bernoulli_cap if cap is None else cap
    if n < 0:
        raise DomainError(f"Bernoulli index must be nonnegative, got {n}")
    if n > cap:
        raise RangeError(f"Bernoulli index {n} exceeds the configured cap {cap}")
    return _bernoulli_table(cap)[n]


def _bernoulli_mpf(n: int) -> mpf:
    return _bernoulli_at(n, mpmath.mp.prec)


@lru_cache(maxsize=4096)
def _bernoulli_at(n: int, prec: int) -> mpf:
    b = bernoulli(n)
    with mpmath.workprec(prec):
        return mpf(b.numerator) / b.denominator


@lru_cache(maxsize=4096)
def _em_coefficient(k: int, prec: int) -> mpf:
    """B_2k / (2k)!"""
    with mpmath.workprec(prec):
        return _bernoulli_at(2 * k, prec) / mpmath.factorial(2 * k)


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

def _is_nonpositive_integer(s: mpc) -> bool:
    return s.imag == 0 and s.real <= 0 and s.real == mpmath.floor(s.real)


def gamma(s, pc: PrecisionContext) -> mpc:
    """Gamma(s) by the Stirling series, shifted upward until |s + r| is large"""
    with pc.workprec():
        s = mpc(s)
        if _is_nonpositive_integer(s):
            raise PoleError(f"Gamma has a pole at s = {mpmath.nstr(s.real, 10)}")

        # Stirling is accurate to ~exp(-2 pi |z|); pick the radius from the precision
        radius = 0.15 * pc.work_bits + 10
        shift = 0
        if s.real < 1:
            shift = int(math.ceil(1 - float(s.real)))
        if abs(s + shift) < radius:
            shift += int(math.ceil(radius - float((s + shift).real)))

        z = s + shift
        log_g = (z - mpf(0.5)) * mpmath.log(z) - z + mpmath.log(2 * mpmath.pi) / 2
        eps = mpf(2) ** (-pc.work_bits)
        z2 = z * z
        zpow = z
        for k in range(1, settings.bernoulli_cap // 2 + 1):
            term = _bernoulli_mpf(2 * k) / (2 * k * (2 * k - 1) * zpow)
            log_g += term
            if abs(term) < eps:
                break
            zpow *= z2

        value = mpmath.exp(log_g)
        # Recurse back down: Gamma(s) = Gamma(s + r) / (s (s+1) ... (s+r-1))
        if shift:
            value /= mpmath.rf(s, shift)
        return pc.round(value)


def gamma_vertical_envelope(sigma, tau, pc: PrecisionContext) -> mpf:
    """sqrt(2 pi) e^{-pi |tau| / 2} |tau|^{sigma - 1/2}, the Stirling size on vertical lines"""
    with pc.workprec():
        tau = abs(mpf(tau))
        if tau < 1:
            raise DomainError(f"envelope needs |tau| >= 1, got {mpmath.nstr(tau, 8)}")
        value = mpmath.sqrt(2 * mpmath.pi) * mpmath.exp(-mpmath.pi * tau / 2) * tau ** (mpf(sigma) - mpf(0.5))
        return pc.round(value)


def gamma_majorant(s, pc: PrecisionContext) -> mpf:
    """
    Upper bound for |Gamma(s)| on Re(s) > 0:
    sqrt(2 pi) |s|^{sigma - 1/2} e^{-pi |tau| / 2} e^{1/(6|s|)}.
    """
    with pc.workprec():
        s = mpc(s)
        if s.real <= 0:
            raise DomainError("Gamma majorant needs Re(s) > 0")
        r = abs(s)
        value = (mpmath.sqrt(2 * mpmath.pi) * r ** (s.real - mpf(0.5))
                 * mpmath.exp(-mpmath.pi * abs(s.imag) / 2 + 1 / (6 * r)))
        return pc.round(value)


# ---------------------------------------------------------------------------
# Zeta and zeta' by Euler-Maclaurin
# ---------------------------------------------------------------------------

def _check_zeta_domain(s: mpc):
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if s.real <= ZETA_RE_MIN or abs(s.imag) > ZETA_IM_LIMIT:
        raise RangeError(
            f"zeta is validated for Re(s) > {ZETA_RE_MIN}, |Im(s)| <= {ZETA_IM_LIMIT}; "
            f"got s = {mpmath.nstr(s, 10)}"
        )


def _correction_size(s: mpc, n_direct: int, k: int) -> float:
    """log2 of |B_2k / (2k)! * (s)_{2k-1} * N^{-s-2k+1}|, in double precision"""
    sigma, tau = float(s.real), float(s.imag)
    # |B_2k| / (2k)! <= 2 zeta(2) / (2 pi)^2k
    log_b = math.log(2 * 1.65) - 2 * k * math.log(2 * math.pi)
    log_poch = sum(0.5 * math.log((sigma + j) ** 2 + tau ** 2 + 1e-300) for j in range(2 * k - 1))
    log_n = (-sigma - 2 * k + 1) * math.log(n_direct)
    return (log_b + log_poch + log_n) / math.log(2)


def em_cutoffs(s, pc: PrecisionContext) -> tuple[int, int]:
    """
    (N, M) for Euler-Maclaurin: start from N = max(ceil(|Im s| / 2), 32), M = 16
    and double both until the first omitted correction is below 2^-(bits + guard).
    """
    s = mpc(s)
    n_direct = max(int(math.ceil(abs(float(s.imag)) / 2)), 32)
    m_corr = 16
    target = -pc.work_bits - 4
    while _correction_size(s, n_direct, m_corr + 1) > target:
        if 2 * (2 * m_corr) > settings.bernoulli_cap:
            n_direct *= 2
        else:
            n_direct *= 2
            m_corr *= 2
    return n_direct, m_corr


def _pochhammer_terms(s: mpc, m_corr: int):
    """Yield (k, P_k, P_k') with P_k = s (s+1) ... (s+2k-2)"""
    p, dp = mpc(1), mpc(0)
    # first factor for k = 1
    p, dp = p * s, dp * s + p
    yield 1, p, dp
    for k in range(2, m_corr + 1):
        for j in (2 * k - 3, 2 * k - 2):
            p, dp = p * (s + j), dp * (s + j) + p
        yield k, p, dp


def _zeta_em(s: mpc, n_direct: int, m_corr: int) -> mpc:
    total = mpc(0)
    for n in range(1, n_direct):
        total += mpmath.power(n, -s)
    n_pow = mpmath.power(n_direct, -s)
    total += n_direct * n_pow / (s - 1) + n_pow / 2
    inv_n2 = mpf(1) / (n_direct * n_direct)
    tail = n_pow / n_direct  # N^{-s-2k+1} for k = 1
    for k, p, _ in _pochhammer_terms(s, m_corr):
        total += _em_coefficient(k, mpmath.mp.prec) * p * tail
        tail *= inv_n2
    return total


def _zeta_prime_em(s: mpc, n_direct: int, m_corr: int) -> mpc:
    total = mpc(0)
    for n in range(2, n_direct):
        total -= mpmath.log(n) * mpmath.power(n, -s)
    log_n = mpmath.log(n_direct)
    n_pow = mpmath.power(n_direct, -s)
    total += n_direct * n_pow * (-log_n / (s - 1) - 1 / (s - 1) ** 2)
    total -= log_n * n_pow / 2
    inv_n2 = mpf(1) / (n_direct * n_direct)
    tail = n_pow / n_direct
    for k, p, dp in _pochhammer_terms(s, m_corr):
        total += _em_coefficient(k, mpmath.mp.prec) * tail * (dp - log_n * p)
        tail *= inv_n2
    return total


def zeta(s, pc: PrecisionContext, cutoffs: tuple[int, int] = None) -> mpc:
    """Riemann zeta for Re(s) > -1, |Im(s)| <= 10^4"""
    with pc.workprec():
        s = mpc(s)
        _check_zeta_domain(s)
        n_direct, m_corr = cutoffs or em_cutoffs(s, pc)
        logger.debug("zeta(%s): N=%d M=%d", mpmath.nstr(s, 8), n_direct, m_corr)
        return pc.round(_zeta_em(s, n_direct, m_corr))


def zeta_with_error(s, pc: PrecisionContext) -> tuple[mpc, mpf]:
    """zeta(s) and its discrepancy against the run with doubled cutoffs"""
    n_direct, m_corr = em_cutoffs(s, pc)
    value = zeta(s, pc, (n_direct, m_corr))
    check = zeta(s, pc, (2 * n_direct, min(2 * m_corr, settings.bernoulli_cap // 2)))
    with pc.workprec():
        return value, abs(check - value)


def zeta_prime(s, pc: PrecisionContext, cutoffs: tuple[int, int] = None) -> mpc:
    """zeta'(s) by the term-wise differentiated Euler-Maclaurin formula"""
    with pc.workprec():
        s = mpc(s)
        _check_zeta_domain(s)
        # the log N factor on every term costs a few bits
        wider = PrecisionContext(bits=pc.bits + 8, guard_bits=pc.guard_bits)
        n_direct, m_corr = cutoffs or em_cutoffs(s, wider)
        return pc.round(_zeta_prime_em(s, n_direct, m_corr))


# ---------------------------------------------------------------------------
# Euler's constant
# ---------------------------------------------------------------------------

def euler_gamma(pc: PrecisionContext) -> mpf:
    with pc.workprec():
        return pc.round(+mpmath.euler)


def euler_gamma_em(pc: PrecisionContext) -> mpf:
    """
    Euler's constant from H_n - log n - 1/(2n) + sum_k B_2k / (2k n^2k),
    independent of the library constant.
    """
    with pc.workprec():
        n = max(pc.work_bits, 64)
        eps = mpf(2) ** (-pc.work_bits)
        harmonic = mpmath.fsum(mpf(1) / j for j in range(1, n + 1))
        value = harmonic - mpmath.log(n) - mpf(1) / (2 * n)
        n2 = mpf(n) ** 2
        n_pow = n2
        for k in range(1, settings.bernoulli_cap // 2 + 1):
            term = _bernoulli_mpf(2 * k) / (2 * k * n_pow)
            value += term
            if abs(term) < eps:
                break
            n_pow *= n2
        return pc.round(value)
