"""
Exact arithmetic functions on 1..N.

The sieve works segment by segment. In each segment every n is divided by the
primes p <= sqrt(N) (and their powers); whatever cofactor is left over is
either 1 or a single prime above sqrt(N). Counting the divisions gives
omega, Omega, tau, mu and the prime-power base for Lambda at once.

`value` is the independent oracle: plain trial division, no sieve.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional

import mpmath
import numpy as np

from app.config import settings
from app.schemas.arith import ArithFunctionId, FactorList
from app.schemas.numeric import PrecisionContext
from app.services.errors import DomainError, LimitOverflowError
from app.services.export import sci, write_csv

logger = logging.getLogger(__name__)

INT64_LIMIT = 2 ** 62


class MangoldtValue(NamedTuple):
    """Lambda(n) + offset, where Lambda(n) = log p for n = p^k; p = 0 means Lambda(n) = 0"""
    p: int
    k: int
    offset: int = 0

    @property
    def is_prime_power(self) -> bool:
        return self.p > 0

    def numeric(self, pc: PrecisionContext):
        with pc.workprec():
            log_p = mpmath.log(self.p) if self.p else mpmath.mpf(0)
            return pc.round(log_p + self.offset)


@dataclass(frozen=True)
class SieveTable:
    """
    Exact values of one arithmetic function on 1..limit.
    Index 0 is unused so that values[n] is a(n).
    """
    fn_id: ArithFunctionId
    limit: int
    values: np.ndarray
    exponents: Optional[np.ndarray] = None  # Lambda family only: k with n = p^k
    prefix_sums: Optional[np.ndarray] = None

    def __getitem__(self, n: int):
        if not 1 <= n <= self.limit:
            raise DomainError(f"n={n} outside the table range 1..{self.limit}")
        if self.exponents is not None:
            return MangoldtValue(int(self.values[n]), int(self.exponents[n]), _mangoldt_offset(self.fn_id))
        return int(self.values[n])

    def __len__(self) -> int:
        return self.limit


def _mangoldt_offset(fn_id: ArithFunctionId) -> int:
    return -1 if fn_id == ArithFunctionId.VON_MANGOLDT_MINUS_ONE else 0


# ---------------------------------------------------------------------------
# Trial-division oracle
# ---------------------------------------------------------------------------

def factorize(n: int) -> FactorList:
    """Factor n by trial division up to sqrt(n)"""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    factors = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        factors.append((m, 1))
    return FactorList(n=n, factors=factors)


def is_prime(n: int) -> bool:
    """Deterministic primality by trial division"""
    if n < 2:
        return False
    return factorize(n).factors == [(n, 1)]


_oracle_primes = [2]


def nth_prime(n: int) -> int:
    """p_n with p_1 = 2, grown on demand by trial division against known primes"""
    if n < 1:
        raise DomainError(f"prime index must be positive, got {n}")
    candidate = _oracle_primes[-1] + (1 if _oracle_primes[-1] == 2 else 2)
    while len(_oracle_primes) < n:
        limit = math.isqrt(candidate)
        for p in _oracle_primes:
            if p > limit:
                _oracle_primes.append(candidate)
                break
            if candidate % p == 0:
                break
        else:
            _oracle_primes.append(candidate)
        candidate += 2
    return _oracle_primes[n - 1]


def value(fn_id: ArithFunctionId, n: int):
    """Exact a(n) from the factorization of n (the testing oracle)"""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")

    if fn_id == ArithFunctionId.PRIME_SEQUENCE:
        return nth_prime(n)

    f = factorize(n)
    sign = 1 if n % 2 else -1  # (-1)^{n+1}
    squarefree = all(e == 1 for _, e in f.factors)
    mu = (-1) ** f.omega if squarefree else 0
    liouville = (-1) ** f.big_omega
    tau = math.prod(e + 1 for _, e in f.factors)

    if fn_id == ArithFunctionId.MOBIUS:
        return mu
    if fn_id == ArithFunctionId.MOBIUS_ALTERNATING:
        return sign * mu
    if fn_id == ArithFunctionId.LIOUVILLE:
        return liouville
    if fn_id == ArithFunctionId.LIOUVILLE_ALTERNATING:
        return sign * liouville
    if fn_id == ArithFunctionId.TAU_DIVISORS:
        return tau
    if fn_id == ArithFunctionId.TWO_OMEGA:
        return 2 ** f.omega
    if fn_id == ArithFunctionId.TWO_OMEGA_MINUS_TAU:
        return 2 ** f.omega - tau
    # Lambda family
    if f.omega == 1:
        p, k = f.factors[0]
        return MangoldtValue(p, k, _mangoldt_offset(fn_id))
    return MangoldtValue(0, 0, _mangoldt_offset(fn_id))


# ---------------------------------------------------------------------------
# Segmented sieve
# ---------------------------------------------------------------------------

def small_primes(limit: int) -> np.ndarray:
    """Eratosthenes up to limit (inclusive)"""
    if limit < 2:
        return np.array([], dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i::i] = False
    return np.nonzero(flags)[0].astype(np.int64)


@dataclass
class _Segment:
    """Factor counts for n in [lo, hi)"""
    lo: int
    n: np.ndarray
    omega: np.ndarray
    big_omega: np.ndarray
    tau: np.ndarray
    mu: np.ndarray
    base: np.ndarray


def _first_multiple(lo: int, d: int) -> int:
    return ((lo + d - 1) // d) * d


def _factor_segment(lo: int, hi: int, primes: np.ndarray) -> _Segment:
    size = hi - lo
    n = np.arange(lo, hi, dtype=np.int64)
    rem = n.copy()
    omega = np.zeros(size, dtype=np.int8)
    big_omega = np.zeros(size, dtype=np.int8)
    tau = np.ones(size, dtype=np.int32)
    mu = np.ones(size, dtype=np.int8)
    base = np.zeros(size, dtype=np.int64)

    for p in primes.tolist():
        if p >= hi:
            break
        first = _first_multiple(lo, p)
        if first >= hi:
            continue
        sub = slice(first - lo, size, p)
        e = np.ones(len(range(first - lo, size, p)), dtype=np.int8)
        pk = p * p
        while pk < hi:
            first_k = _first_multiple(lo, pk)
            if first_k < hi:
                e[(first_k - first) // p::pk // p] += 1
            pk *= p
        rem[sub] //= np.power(p, e.astype(np.int64))
        omega[sub] += 1
        big_omega[sub] += e
        tau[sub] *= (e.astype(np.int32) + 1)
        mu[sub] = np.where(e >= 2, 0, -mu[sub]).astype(np.int8)
        base[sub] = p

    # What is left is 1 or one prime above sqrt(limit)
    large = rem > 1
    omega[large] += 1
    big_omega[large] += 1
    tau[large] *= 2
    mu[large] = -mu[large]
    prime_itself = large & (rem == n)
    base[prime_itself] = n[prime_itself]
    # Only prime powers keep a base
    base[omega != 1] = 0
    return _Segment(lo=lo, n=n, omega=omega, big_omega=big_omega, tau=tau, mu=mu, base=base)


def _segment_values(fn_id: ArithFunctionId, seg: _Segment):
    """(values, exponents) of fn_id on one segment"""
    odd = (seg.n % 2) == 1
    if fn_id == ArithFunctionId.MOBIUS:
        return seg.mu, None
    if fn_id == ArithFunctionId.MOBIUS_ALTERNATING:
        return np.where(odd, seg.mu, -seg.mu).astype(np.int8), None
    liouville = (1 - 2 * (seg.big_omega.astype(np.int8) & 1)).astype(np.int8)
    if fn_id == ArithFunctionId.LIOUVILLE:
        return liouville, None
    if fn_id == ArithFunctionId.LIOUVILLE_ALTERNATING:
        return np.where(odd, liouville, -liouville).astype(np.int8), None
    if fn_id == ArithFunctionId.TAU_DIVISORS:
        return seg.tau, None
    two_omega = np.left_shift(np.int32(1), seg.omega.astype(np.int32))
    if fn_id == ArithFunctionId.TWO_OMEGA:
        return two_omega, None
    if fn_id == ArithFunctionId.TWO_OMEGA_MINUS_TAU:
        return two_omega - seg.tau, None
    # Lambda family
    exponents = np.where(seg.base > 0, seg.big_omega, 0).astype(np.int8)
    return seg.base, exponents


def _check_cap(required: int, cap: int, what: str = "sieve"):
    if required > cap:
        raise LimitOverflowError(required, cap, what)


def iter_segments(fn_id: ArithFunctionId, limit: int, segment_size: int = None) -> Iterator[tuple]:
    """
    Yield (lo, values, exponents) for consecutive segments covering 1..limit.
    values[i] is a(lo + i). Segments are produced in increasing order.
    """
    if limit < 1:
        raise DomainError(f"sieve limit must be positive, got {limit}")
    segment_size = segment_size or settings.segment_size

    if fn_id == ArithFunctionId.PRIME_SEQUENCE:
        yield from _iter_prime_sequence(limit, segment_size)
        return

    primes = small_primes(math.isqrt(limit))
    for lo in range(1, limit + 1, segment_size):
        hi = min(lo + segment_size, limit + 1)
        seg = _factor_segment(lo, hi, primes)
        values, exponents = _segment_values(fn_id, seg)
        logger.debug("sieved %s on [%d, %d)", fn_id.value, lo, hi)
        yield lo, values, exponents


def prime_upper_bound(n: int) -> int:
    """p_n < n (log n + log log n) for n >= 6"""
    if n < 6:
        return 13
    return int(n * (math.log(n) + math.log(math.log(n)))) + 1


def _iter_prime_sequence(count: int, segment_size: int):
    """Yield (lo, p_lo..p_hi, None) as the primes are found, segment by segment"""
    bound = prime_upper_bound(count)
    if bound >= INT64_LIMIT:
        raise DomainError(f"the {count}-th prime does not fit in 64-bit integers")
    sieving = small_primes(math.isqrt(bound))
    found = 0
    for lo in range(2, bound + 1, segment_size):
        hi = min(lo + segment_size, bound + 1)
        flags = np.ones(hi - lo, dtype=bool)
        for p in sieving.tolist():
            if p * p >= hi:
                break
            start = max(p * p, _first_multiple(lo, p))
            flags[start - lo::p] = False
        primes = np.nonzero(flags)[0].astype(np.int64) + lo
        primes = primes[: count - found]
        if len(primes):
            yield found + 1, primes, None
            found += len(primes)
        if found >= count:
            return


def sieve(fn_id: ArithFunctionId, limit: int, prefix_sums: bool = False,
          memory_cap: int = None, segment_size: int = None) -> SieveTable:
    """Exact table of fn_id on 1..limit"""
    memory_cap = settings.memory_cap if memory_cap is None else memory_cap
    if limit < 1:
        raise DomainError(f"sieve limit must be positive, got {limit}")
    _check_cap(limit, memory_cap)
    if prefix_sums and not fn_id.integer_valued:
        raise DomainError(f"prefix sums are only defined for integer-valued functions, not {fn_id.value}")

    chunks, exp_chunks = [], []
    for _, values, exponents in iter_segments(fn_id, limit, segment_size):
        chunks.append(values)
        if exponents is not None:
            exp_chunks.append(exponents)

    dtype = chunks[0].dtype
    values = np.concatenate([np.zeros(1, dtype=dtype)] + chunks)
    exponents = np.concatenate([np.zeros(1, dtype=np.int8)] + exp_chunks) if exp_chunks else None

    sums = None
    if prefix_sums:
        sums = np.cumsum(values, dtype=np.int64)

    logger.info("sieved %s up to %d", fn_id.value, limit)
    return SieveTable(fn_id=fn_id, limit=limit, values=values, exponents=exponents, prefix_sums=sums)


def mertens(table: SieveTable, x: int) -> int:
    """M(x) = sum_{n <= x} mu(n) from the prefix sums"""
    if table.fn_id != ArithFunctionId.MOBIUS or table.prefix_sums is None:
        raise DomainError("mertens needs a Mobius table built with prefix sums")
    if not 1 <= x <= table.limit:
        raise DomainError(f"x={x} outside 1..{table.limit}")
    return int(table.prefix_sums[x])


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def table_rows(table: SieveTable, pc: PrecisionContext = None):
    """CSV rows (header first) for a table"""
    if table.exponents is not None:
        pc = pc or PrecisionContext()
        yield ["n", "value", "p", "k"]
        for n in range(1, table.limit + 1):
            v = table[n]
            yield [n, sci(v.numeric(pc), pc), v.p, v.k]
        return

    header = ["n", "value"] + (["prefix"] if table.prefix_sums is not None else [])
    yield header
    for n in range(1, table.limit + 1):
        row = [n, int(table.values[n])]
        if table.prefix_sums is not None:
            row.append(int(table.prefix_sums[n]))
        yield row


def table_to_csv(table: SieveTable, stream, pc: PrecisionContext = None):
    write_csv(table_rows(table, pc), stream=stream)
