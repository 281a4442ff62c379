"""
Analytic orders of the Tate-Shafarevich groups of E1(u) and E2(u), assuming
the Birch and Swinnerton-Dyer formula.

With trivial Tamagawa factors at the bad primes of E1, C_inf(E1) = 2 Omega
and torsion of order 2,

    |Sha(E1)| = 2 L(1) / Omega

and for E2, with C_p = 2 at each of the k primes dividing u^2 + 64,

    |Sha(E2)| = L(1) / (2^(k-2) Omega) = |Sha(E1)| / 2^(k-1)
"""

import dataclasses
import enum
import logging
import typing

import mpmath

from .arith import factorize, is_square, prime_sieve
from .curves import CurveParams, classify
from .error import PrecisionError, RejectedCurveError
from .lseries import ApCache, LValueResult, ap, l_at_1, lprime_at_1
from .periods import real_period

ZERO_THRESHOLD = 0.5
"""2 L(1) / Omega below this means L(1) = 0; a non-zero order is at least 1"""

ROUNDING_TOLERANCE = 0.01


@dataclasses.dataclass(frozen=True)
class EvalParams:
    precision_bits: int = 96
    term_scale: int = 1
    """Multiplier on the series term count"""
    tail_tolerance: float = 1e-10
    retries: int = 3
    """Escalations (doubled terms, 32 more bits) before giving up on rounding"""
    certify_bound: int = 2
    """Odd primes up to this bound are also checked by certify"""

    def escalated(self) -> "EvalParams":
        return dataclasses.replace(
            self,
            precision_bits=self.precision_bits + 32,
            term_scale=self.term_scale * 2,
        )


class TwoPart(enum.Enum):
    TRIVIAL = "trivial"
    UNKNOWN = "unknown"


@dataclasses.dataclass(frozen=True)
class ShaResult:
    lvalue: LValueResult
    omega: mpmath.mpf
    raw1: mpmath.mpf
    raw2: mpmath.mpf
    sha1: int
    sha2: int
    is_zero: bool
    square1: typing.Optional[bool]
    square2: typing.Optional[bool]
    certified_odd_primes: typing.List[int]
    rounding_error: float
    two_part1: typing.Optional[TwoPart]
    two_part2: typing.Optional[TwoPart]
    params: EvalParams
    """Parameters of the successful attempt"""


@dataclasses.dataclass(frozen=True)
class RankOneResult:
    lprime: LValueResult
    omega: mpmath.mpf
    sha_times_reg1: mpmath.mpf
    """2 L'(1) / Omega = |Sha(E1)| R(E1)"""


def _accepted(u: int, curve: typing.Optional[CurveParams]) -> CurveParams:
    if curve is None:
        curve = classify(u)
    if not curve.accepted:
        raise RejectedCurveError(f"Curve rejected ({curve.reason.value})", u=u)
    return curve


def _two_part(sha: int) -> TwoPart:
    return TwoPart.TRIVIAL if sha % 2 else TwoPart.UNKNOWN


def _round(u: int, raw) -> typing.Tuple[int, float]:
    value = int(mpmath.nint(raw))
    error = float(abs(raw - value))
    if not error < ROUNDING_TOLERANCE:
        raise PrecisionError(
            f"{mpmath.nstr(raw, 12)} is {error:.3g} from the nearest integer", u=u
        )
    return value, error


def _analytic_sha(
    u: int, curve: CurveParams, params: EvalParams, cache: typing.Optional[ApCache]
) -> ShaResult:
    lvalue = l_at_1(
        u,
        curve,
        precision_bits=params.precision_bits,
        term_scale=params.term_scale,
        tail_tolerance=params.tail_tolerance,
        cache=cache,
    )
    omega = real_period(u, params.precision_bits).omega
    with mpmath.workprec(params.precision_bits):
        raw1 = 2 * lvalue.value / omega
        raw2 = mpmath.ldexp(raw1, 1 - curve.k)

        if raw1 < ZERO_THRESHOLD:
            return ShaResult(
                lvalue=lvalue,
                omega=omega,
                raw1=raw1,
                raw2=raw2,
                sha1=0,
                sha2=0,
                is_zero=True,
                square1=None,
                square2=None,
                certified_odd_primes=[],
                rounding_error=float(abs(raw1)),
                two_part1=None,
                two_part2=None,
                params=params,
            )

        sha1, error1 = _round(u, raw1)
        sha2, error2 = _round(u, raw2)
    result = ShaResult(
        lvalue=lvalue,
        omega=omega,
        raw1=raw1,
        raw2=raw2,
        sha1=sha1,
        sha2=sha2,
        is_zero=False,
        square1=is_square(sha1),
        square2=is_square(sha2),
        certified_odd_primes=[],
        rounding_error=max(error1, error2),
        two_part1=_two_part(sha1),
        two_part2=_two_part(sha2),
        params=params,
    )
    return dataclasses.replace(
        result,
        certified_odd_primes=certify(u, result, params.certify_bound, cache),
    )


def analytic_sha(
    u: int,
    curve: typing.Optional[CurveParams] = None,
    params: EvalParams = EvalParams(),
    cache: typing.Optional[ApCache] = None,
) -> ShaResult:
    """
    Analytic |Sha(E1(u))| and |Sha(E2(u))| for root number +1. Raises
    PrecisionError when rounding still fails after params.retries escalations.
    """
    curve = _accepted(u, curve)
    attempt_params = params
    for attempt in range(params.retries + 1):
        try:
            return _analytic_sha(u, curve, attempt_params, cache)
        except PrecisionError as e:
            if attempt == params.retries:
                raise
            attempt_params = attempt_params.escalated()
            logging.debug(
                "%s, retrying with %d bits and term scale %d",
                e,
                attempt_params.precision_bits,
                attempt_params.term_scale,
            )


def rank_one_product(
    u: int,
    curve: typing.Optional[CurveParams] = None,
    params: EvalParams = EvalParams(),
    cache: typing.Optional[ApCache] = None,
) -> RankOneResult:
    curve = _accepted(u, curve)
    lprime = lprime_at_1(
        u,
        curve,
        precision_bits=params.precision_bits,
        term_scale=params.term_scale,
        tail_tolerance=params.tail_tolerance,
        cache=cache,
    )
    omega = real_period(u, params.precision_bits).omega
    with mpmath.workprec(params.precision_bits):
        product = 2 * lprime.value / omega
    return RankOneResult(lprime=lprime, omega=omega, sha_times_reg1=product)


def good_ordinary(u: int, p: int, cache: typing.Optional[ApCache] = None) -> bool:
    """
    Whether p is a prime of good ordinary reduction: p does not divide
    u^2 + 64 nor a_p
    """
    if p < 3:
        raise ValueError(f"Good ordinary check requires an odd prime, got {p}")
    if (u * u + 64) % p == 0:
        return False
    return ap(u, p, cache) % p != 0


def certify(
    u: int,
    sha: ShaResult,
    bound: int = 2,
    cache: typing.Optional[ApCache] = None,
) -> typing.List[int]:
    """
    Odd primes whose p-part of the BSD formula is proven: those dividing the
    analytic orders, plus odd primes up to bound, at which E(u) is good
    ordinary. Ascending.
    """
    if sha.is_zero:
        raise ValueError(f"u={u}: no order to certify for L(1) = 0")
    candidates = set()
    product = sha.sha1 * sha.sha2
    if 1 < product:
        candidates.update(factorize(product).primes)
    if 3 <= bound:
        candidates.update(prime_sieve(bound))
    return sorted(p for p in candidates if 3 <= p and good_ordinary(u, p, cache))


def fully_certified(sha: ShaResult, curve_index: int) -> bool:
    """
    Whether the analytic order of E_i(u) is proven: it is odd, and every
    prime dividing it is certified
    """
    if sha.is_zero:
        return False
    order = sha.sha1 if curve_index == 1 else sha.sha2
    return order_certified(order, sha.certified_odd_primes)


def order_certified(order: int, certified: typing.Iterable[int]) -> bool:
    if order < 1 or not order % 2:
        return False
    if order == 1:
        return True
    certified = set(certified)
    return all(p in certified for p in factorize(order).primes)
