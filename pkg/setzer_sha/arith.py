"""
Exact integer arithmetic: primality, factorization, quadratic characters,
prime sieving
"""

import collections
import dataclasses
import functools
import itertools
import math
import typing

import dataclasses_json
import numpy

TRIAL_DIVISION_BOUND = 10**6

# deterministic below 2^64 (http://miller-rabin.appspot.com/)
_WITNESSES_64 = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)

# first 13 primes are deterministic below this bound (Sorenson-Webster)
_WITNESSES_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_WITNESSES_PRIMES_BOUND = 3317044064679887385961981

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61)
_SMALL_PRIMES += (67, 71, 73, 79, 83, 89, 97)


@dataclasses_json.dataclass_json(letter_case=dataclasses_json.LetterCase.CAMEL)
@dataclasses.dataclass(frozen=True)
class Factorization:
    n: int
    primes: typing.List[int]
    """Distinct prime divisors, ascending"""
    exponents: typing.List[int]

    @property
    def k(self) -> int:
        """
        Number of distinct prime factors
        """
        return len(self.primes)

    @property
    def squarefree(self) -> bool:
        return all(e == 1 for e in self.exponents)


def is_square(n: int) -> bool:
    return 0 <= n and math.isqrt(n) ** 2 == n


def is_prime(n: int) -> bool:
    """
    Deterministic primality: Miller-Rabin with proven witness sets below
    3.3e24, Baillie-PSW above
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < 100 * 100:
        return True

    if n < 2**64:
        witnesses = _WITNESSES_64
    elif n < _WITNESSES_PRIMES_BOUND:
        witnesses = _WITNESSES_PRIMES
    else:
        return _strong_probable_prime(n, 2) and _strong_lucas_probable_prime(n)
    return all(_strong_probable_prime(n, a) for a in witnesses)


def _strong_probable_prime(n: int, a: int) -> bool:
    a %= n
    if a == 0:
        return True
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(1, s):
        x = x * x % n
        if x == n - 1:
            return True
        if x == 1:
            return False
    return False


def _strong_lucas_probable_prime(n: int) -> bool:
    # Selfridge parameters: first D in 5, -7, 9, -11, ... with (D/n) = -1
    if is_square(n):
        return False
    d = 5
    while True:
        j = jacobi(d, n)
        if j == -1:
            break
        if j == 0 and abs(d) != n:
            return False
        d = -d - 2 if d > 0 else -d + 2
    p, q = 1, (1 - d) // 4

    k, s = n + 1, 0
    while not k & 1:
        k >>= 1
        s += 1

    u, v, qk = 1, p, q % n
    for bit in bin(k)[3:]:
        u = u * v % n
        v = (v * v - 2 * qk) % n
        qk = qk * qk % n
        if bit == "1":
            u, v = p * u + v, d * u + p * v
            if u & 1:
                u += n
            if v & 1:
                v += n
            u = (u // 2) % n
            v = (v // 2) % n
            qk = qk * q % n

    if u == 0 or v == 0:
        return True
    for _ in range(s - 1):
        v = (v * v - 2 * qk) % n
        qk = qk * qk % n
        if v == 0:
            return True
    return False


def jacobi(a: int, n: int) -> int:
    """
    Jacobi symbol (a/n) for odd positive n
    """
    acc = 1
    while True:
        a %= n
        if a == 0:
            return 0 if n != 1 else acc
        while not a & 1:
            a >>= 1
            if n & 7 in (3, 5):
                acc = -acc
        if a == 1:
            return acc
        if a & 3 == 3 and n & 3 == 3:
            acc = -acc
        a, n = n, a


def legendre(a: int, p: int) -> int:
    """
    Quadratic residue character of a mod the odd prime p
    """
    return jacobi(a % p, p)


def residue_table(p: int, limit: typing.Optional[int] = None) -> numpy.ndarray:
    """
    Read-only table of legendre(a, p) for 0 <= a < p, built by marking squares
    """
    if limit is not None and p > limit:
        raise MemoryError(f"Residue table for p={p} exceeds limit of {limit} bytes")
    table = numpy.full(p, -1, dtype=numpy.int8)
    x = numpy.arange(1, (p + 1) // 2, dtype=numpy.int64)
    table[x * x % p] = 1
    table[0] = 0
    table.flags.writeable = False
    return table


def _base_sieve(n: int) -> numpy.ndarray:
    if n < 2:
        return numpy.array([], dtype=numpy.int64)
    flags = numpy.ones(n + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return numpy.nonzero(flags)[0]


def prime_sieve(bound: int) -> typing.List[int]:
    """
    Primes up to bound, ascending. Segmented, memory O(sqrt(bound) + segment).
    """
    root = math.isqrt(bound)
    base = _base_sieve(root)
    segment = max(root, 1 << 15)

    chunks = [base]
    for low in range(root + 1, bound + 1, segment):
        high = min(low + segment, bound + 1)
        flags = numpy.ones(high - low, dtype=bool)
        for p in base.tolist():
            start = max(p * p, -(-low // p) * p)
            flags[start - low :: p] = False
        chunks.append(numpy.nonzero(flags)[0] + low)
    return numpy.concatenate(chunks).tolist()


@functools.lru_cache(maxsize=None)
def _trial_primes() -> typing.Tuple[int, ...]:
    return tuple(prime_sieve(TRIAL_DIVISION_BOUND))


def factorize(n: int) -> Factorization:
    """
    Trial division by sieved primes, then Pollard rho (Brent) on the cofactor
    """
    if n < 2:
        raise ValueError(f"Cannot factorize {n}")
    original = n
    factors = collections.Counter()

    for p in _trial_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors[p] = e

    pending = [n] if n > 1 else []
    while pending:
        m = pending.pop()
        if is_prime(m):
            factors[m] += 1
            continue
        divisor = _pollard_brent(m)
        pending.append(divisor)
        pending.append(m // divisor)

    primes = sorted(factors)
    return Factorization(
        n=original, primes=primes, exponents=[factors[p] for p in primes]
    )


def _pollard_brent(n: int) -> int:
    """
    Non-trivial divisor of the odd composite n
    """
    if not n & 1:
        return 2
    root = math.isqrt(n)
    if root * root == n:
        return root
    for c in itertools.count(1):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
