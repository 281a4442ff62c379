"""
Dirichlet coefficients and central values of L(E(u), s)
"""

import dataclasses
import enum
import logging
import math
import os
import time
import typing

import mpmath
import numpy

from .arith import legendre, prime_sieve, residue_table
from .collection.lru import LruCache
from .curves import CurveParams, classify, model
from .error import PrecisionError, RejectedCurveError, WrongSignError
from .frobenius import trace_of_frobenius
from .log import TRACE
from .special import exponential_integral

CACHE_MB_ENV = "SETZER_SHA_CACHE_MB"

DEFAULT_CACHE_MB = 256

RESIDUE_TABLE_LIMIT = 1 << 28
"""Largest residue table built, in bytes"""

TAIL_RELATIVE_LIMIT = 1e-4

BSGS_MIN_PRIME = 1 << 12
"""From here a_p comes from baby-step giant-step instead of a character sum"""


class LValueKind(enum.Enum):
    L_AT_1 = "l"
    LPRIME_AT_1 = "lprime"


@dataclasses.dataclass(frozen=True)
class LValueResult:
    kind: LValueKind
    value: mpmath.mpf
    terms_used: int
    tail_bound: float
    precision_bits: int


class ApCache:
    """
    Cache of a_p keyed by (p, u mod p) (u mod 8 for p = 2), and of residue
    tables keyed by p.
    Entry sizes are estimated in bytes against one shared budget.
    """

    def __init__(self, budget_mb: int = DEFAULT_CACHE_MB):
        self._entries: LruCache[tuple, typing.Any] = LruCache(budget_mb << 20)

    def ap(self, p: int, residue: int, fn: typing.Callable[[], int]) -> int:
        return self._entries.get_or_create(("ap", p, residue), fn, 64)

    def residue_table(self, p: int) -> numpy.ndarray:
        return self._entries.get_or_create(
            ("chi", p), lambda: residue_table(p, RESIDUE_TABLE_LIMIT), p + 96
        )

    @property
    def hits(self) -> int:
        return self._entries.hits

    @property
    def misses(self) -> int:
        return self._entries.misses


_default_cache: typing.Optional[ApCache] = None


def default_cache() -> ApCache:
    """
    Per-process cache, sized by SETZER_SHA_CACHE_MB
    """
    global _default_cache
    if _default_cache is None:
        budget = int(os.environ.get(CACHE_MB_ENV, DEFAULT_CACHE_MB))
        logging.debug("a_p cache budget %d MB", budget)
        _default_cache = ApCache(budget)
    return _default_cache


def _ap_two(u: int) -> int:
    m = model(u, 1)
    count = 1
    for x in range(2):
        for y in range(2):
            if m.on_curve(x, y, 2):
                count += 1
    return 3 - count


def _ap_odd(u: int, p: int, table: typing.Callable[[], numpy.ndarray]) -> int:
    # y^2 = x^3 + (b2/4) x^2 + (b4/2) x + b6/4 with b2 = u, b4 = -2, b6 = 0
    a2 = u * pow(4, -1, p) % p
    a4 = -1 % p
    if BSGS_MIN_PRIME <= p:
        trace = trace_of_frobenius(a2, a4, p)
        if trace is not None:
            return trace
        logging.debug("u=%d: ambiguous trace at p=%d, summing characters", u, p)
    x = numpy.arange(p, dtype=numpy.int64)
    x2 = x * x % p
    f = (x2 * x % p + a2 * x2 + a4 * x) % p
    return -int(table()[f].sum(dtype=numpy.int64))


def ap(u: int, p: int, cache: typing.Optional[ApCache] = None) -> int:
    """
    Trace of Frobenius a_p of E1(u) (equal to that of E2(u)). At p | u^2 + 64
    the reduction is a node at x = -u/8, split exactly when (2u / p) = 1.
    """
    if (u * u + 64) % p == 0:
        return legendre(2 * u, p)
    if p == 2:
        if cache is None:
            return _ap_two(u)
        return cache.ap(2, u % 8, lambda: _ap_two(u))
    if cache is None:
        return _ap_odd(u, p, lambda: residue_table(p, RESIDUE_TABLE_LIMIT))
    residue = u % p
    return cache.ap(
        p, residue, lambda: _ap_odd(residue, p, lambda: cache.residue_table(p))
    )


def an_stream(
    u: int, m: int, cache: typing.Optional[ApCache] = None
) -> typing.List[int]:
    """
    Coefficients a_0, a_1, ..., a_m (a_0 = 0 as padding, so index is n)
    """
    if m < 1:
        raise ValueError(f"Invalid term count {m}")
    n_value = u * u + 64
    primes = numpy.array(prime_sieve(m), dtype=numpy.int64)
    traces = numpy.array([ap(u, p, cache) for p in primes.tolist()], dtype=numpy.int64)
    a = numpy.ones(m + 1, dtype=numpy.int64)
    a[0] = 0

    split = int(numpy.searchsorted(primes, math.isqrt(m), side="right"))
    for p, a_p in zip(primes[:split].tolist(), traces[:split].tolist()):
        # factors[j - 1] = a at the p-part of j p
        factors = numpy.full(m // p, a_p, dtype=numpy.int64)
        weight = 0 if n_value % p == 0 else p
        previous, current = 1, a_p
        pk = p
        while pk * p <= m:
            previous, current = current, a_p * current - weight * previous
            factors[pk - 1 :: pk] = current
            pk *= p
        a[p::p] *= factors

    # at most one prime factor above sqrt(m)
    large, large_traces = primes[split:], traces[split:]
    multipliers = m // int(large[0]) if len(large) else 0
    for c in range(1, multipliers + 1):
        count = int(numpy.searchsorted(large, m // c, side="right"))
        a[c * large[:count]] *= large_traces[:count]

    logging.log(TRACE, "u=%d: a_n up to %d, %d primes", u, m, len(primes))
    return a.tolist()


def terms_needed(n: int) -> int:
    """
    ceil(sqrt(N) log N / 8), enough terms to decide the rounded order
    """
    return math.ceil(math.sqrt(n) * math.log(n) / 8)


def tail_bound(n: int, m: int, kind: LValueKind) -> float:
    """
    Bound on the series terms beyond m, using |a_n| / n <= 2
    """
    c = 2 * math.pi / math.sqrt(n)
    bound = 4 * math.exp(-c * (m + 1)) / -math.expm1(-c)
    if kind == LValueKind.LPRIME_AT_1:
        # E1(x) < e^-x / x
        bound /= c * (m + 1)
    return bound


def tail_terms(n: int, tolerance: float, kind: LValueKind) -> int:
    """
    Least m with tail_bound(n, m, kind) < tolerance
    """
    c = 2 * math.pi / math.sqrt(n)
    m = max(1, math.ceil(math.log(4 / (tolerance * -math.expm1(-c))) / c) - 1)
    while tail_bound(n, m, kind) >= tolerance:
        m += 1
    while 1 < m and tail_bound(n, m - 1, kind) < tolerance:
        m -= 1
    return m


def series_terms(n: int, tolerance: float, kind: LValueKind, scale: int = 1) -> int:
    return max(terms_needed(n), tail_terms(n, tolerance, kind)) * scale


def _curve(u: int, curve: typing.Optional[CurveParams]) -> CurveParams:
    if curve is None:
        curve = classify(u)
    if not curve.accepted:
        raise RejectedCurveError(f"Curve rejected ({curve.reason.value})", u=u)
    return curve


def l_at_1(
    u: int,
    curve: typing.Optional[CurveParams] = None,
    precision_bits: int = 96,
    term_scale: int = 1,
    tail_tolerance: float = 1e-10,
    cache: typing.Optional[ApCache] = None,
) -> LValueResult:
    """
    L(E(u), 1) = 2 sum a_n / n exp(-2 pi n / sqrt(N)), for root number +1
    """
    curve = _curve(u, curve)
    if curve.epsilon != 1:
        raise WrongSignError(
            "L(1) vanishes identically for root number -1, use L'(1)", u=u
        )
    kind = LValueKind.L_AT_1
    m = series_terms(curve.n, tail_tolerance, kind, term_scale)
    start = time.perf_counter()
    a = an_stream(u, m, cache)
    # fixed point with enough guard bits to absorb one truncation per term
    bits = precision_bits + m.bit_length() + 8
    with mpmath.workprec(bits + 16):
        q = mpmath.exp(-2 * mpmath.pi / mpmath.sqrt(curve.n))
        q_fixed = int(mpmath.floor(mpmath.ldexp(q, bits)))
    qn = 1 << bits
    total = 0
    for n in range(1, m + 1):
        qn = qn * q_fixed >> bits
        if not qn:
            break
        if a[n]:
            total += a[n] * qn // n
    with mpmath.workprec(precision_bits):
        value = mpmath.ldexp(mpmath.mpf(2 * total), -bits)
    result = _checked(u, kind, value, m, tail_bound(curve.n, m, kind), precision_bits)
    if result.value < -result.tail_bound:
        raise PrecisionError(f"Negative L(1) = {mpmath.nstr(result.value, 8)}", u=u)
    end = time.perf_counter()
    logging.log(TRACE, "u=%d: L(1) with %d terms (%.3fs)", u, m, end - start)
    return result


def lprime_at_1(
    u: int,
    curve: typing.Optional[CurveParams] = None,
    precision_bits: int = 96,
    term_scale: int = 1,
    tail_tolerance: float = 1e-10,
    cache: typing.Optional[ApCache] = None,
) -> LValueResult:
    """
    L'(E(u), 1) = 2 sum a_n / n E1(2 pi n / sqrt(N)), for root number -1
    """
    curve = _curve(u, curve)
    if curve.epsilon != -1:
        raise WrongSignError("L'(1) requested for root number +1, use L(1)", u=u)
    kind = LValueKind.LPRIME_AT_1
    m = series_terms(curve.n, tail_tolerance, kind, term_scale)
    start = time.perf_counter()
    a = an_stream(u, m, cache)
    with mpmath.workprec(precision_bits):
        c = 2 * mpmath.pi / mpmath.sqrt(curve.n)
        total = mpmath.mpf(0)
        for n in range(1, m + 1):
            if a[n]:
                total += exponential_integral(c * n, precision_bits) * a[n] / n
        value = 2 * total
    result = _checked(u, kind, value, m, tail_bound(curve.n, m, kind), precision_bits)
    end = time.perf_counter()
    logging.log(TRACE, "u=%d: L'(1) with %d terms (%.3fs)", u, m, end - start)
    return result


def _checked(
    u: int, kind: LValueKind, value, m: int, tail: float, precision_bits: int
) -> LValueResult:
    if not tail < TAIL_RELATIVE_LIMIT * max(1, abs(value)):
        raise PrecisionError(f"Tail bound {tail:.3g} too large for {kind.value}", u=u)
    return LValueResult(
        kind=kind,
        value=value,
        terms_used=m,
        tail_bound=tail,
        precision_bits=precision_bits,
    )
