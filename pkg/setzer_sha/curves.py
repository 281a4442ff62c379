"""
Neumann-Setzer type curves E1(u), E2(u) of conductor u^2 + 64
"""

import dataclasses
import enum
import logging
import math
import typing

import dataclasses_json

from .arith import Factorization, factorize, is_square
from .error import BadResidueError, RejectedCurveError
from .log import TRACE

MAX_ABS_U = 2**50


class CurveClass(enum.Enum):
    STAR = "star"
    """u^2 + 64 prime"""
    DOUBLE_STAR = "doublestar"
    """u^2 + 64 squarefree with an odd number (at least 3) of prime factors"""
    EVEN_K = "evenk"
    """u^2 + 64 squarefree with an even number of prime factors"""
    REJECTED = "rejected"


class RejectReason(enum.Enum):
    BAD_RESIDUE = "bad_residue"
    NOT_SQUAREFREE = "not_squarefree"


@dataclasses_json.dataclass_json(letter_case=dataclasses_json.LetterCase.CAMEL)
@dataclasses.dataclass(frozen=True)
class CurveParams:
    u: int
    n: int
    """Conductor u^2 + 64"""
    factorization: typing.Optional[Factorization]
    k: typing.Optional[int]
    """Number of distinct prime factors of n"""
    curve_class: CurveClass
    epsilon: typing.Optional[int]
    """Root number, when n is squarefree"""
    reason: typing.Optional[RejectReason] = None

    @property
    def accepted(self) -> bool:
        return self.curve_class != CurveClass.REJECTED

    @property
    def primes(self) -> typing.List[int]:
        return self.factorization.primes if self.factorization is not None else []


@dataclasses.dataclass(frozen=True)
class WeierstrassModel:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    curve_index: int

    @property
    def b2(self) -> int:
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self) -> int:
        return (
            self.a1 * self.a1 * self.a6
            + 4 * self.a2 * self.a6
            - self.a1 * self.a3 * self.a4
            + self.a2 * self.a3 * self.a3
            - self.a4 * self.a4
        )

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def on_curve(self, x: int, y: int, p: int) -> bool:
        """
        Whether (x, y) satisfies the long Weierstrass equation mod p
        """
        left = y * y + self.a1 * x * y + self.a3 * y
        right = x**3 + self.a2 * x * x + self.a4 * x + self.a6
        return (left - right) % p == 0


@dataclasses.dataclass(frozen=True)
class CurveInvariants:
    torsion_order: int
    cfin1: int
    cfin2: int
    cinf_factor1: int
    """C_inf(E1) = cinf_factor1 * omega"""
    cinf_factor2: int
    rank_bound: int


def check_residue(u: int):
    if u % 4 != 1:
        raise BadResidueError("u must be 1 mod 4", u=u)


def root_number(k: int) -> int:
    """
    Root number (-1)^(k+1) of E(u) when u^2 + 64 is a product of k distinct primes
    """
    if k < 1:
        raise ValueError(f"Invalid prime factor count {k}")
    return 1 if k % 2 else -1


def classify(u: int) -> CurveParams:
    if abs(u) > MAX_ABS_U:
        raise ValueError(f"|u| exceeds {MAX_ABS_U}")
    n = u * u + 64
    if u % 4 != 1:
        logging.log(TRACE, "Rejected u=%d: bad residue", u)
        return CurveParams(
            u=u,
            n=n,
            factorization=None,
            k=None,
            curve_class=CurveClass.REJECTED,
            epsilon=None,
            reason=RejectReason.BAD_RESIDUE,
        )

    factorization = factorize(n)
    k = factorization.k
    if not factorization.squarefree:
        logging.log(TRACE, "Rejected u=%d: %d not squarefree", u, n)
        return CurveParams(
            u=u,
            n=n,
            factorization=factorization,
            k=k,
            curve_class=CurveClass.REJECTED,
            epsilon=None,
            reason=RejectReason.NOT_SQUAREFREE,
        )

    if k == 1:
        curve_class = CurveClass.STAR
    elif k % 2:
        curve_class = CurveClass.DOUBLE_STAR
    else:
        curve_class = CurveClass.EVEN_K
    return CurveParams(
        u=u,
        n=n,
        factorization=factorization,
        k=k,
        curve_class=curve_class,
        epsilon=root_number(k),
    )


def model(u: int, curve_index: int) -> WeierstrassModel:
    """
    Long Weierstrass model of E1(u) or E2(u)
    """
    check_residue(u)
    a2 = (u - 1) // 4
    if curve_index == 1:
        result = WeierstrassModel(1, a2, 0, -1, 0, curve_index)
        expected = u * u + 64
    elif curve_index == 2:
        result = WeierstrassModel(1, a2, 0, 4, u, curve_index)
        expected = -((u * u + 64) ** 2)
    else:
        raise ValueError(f"Invalid curve index {curve_index}")
    if result.discriminant != expected:
        raise ArithmeticError(
            f"Discriminant {result.discriminant} of E{curve_index}({u}),"
            f" expected {expected}"
        )
    return result


def invariants(params: CurveParams) -> CurveInvariants:
    if not params.accepted:
        raise RejectedCurveError(f"Curve rejected ({params.reason.value})", u=params.u)
    return CurveInvariants(
        torsion_order=2,
        cfin1=1,
        cfin2=2**params.k,
        cinf_factor1=2,
        cinf_factor2=1,
        rank_bound=max(0, params.k - 1),
    )


def _monotone_root(
    value: typing.Callable[[int], int], low: int, high: int
) -> typing.Optional[int]:
    """
    Integer zero of value on [low, high], where value is monotone
    """
    if high < low:
        return None
    f_low, f_high = value(low), value(high)
    if f_low == 0:
        return low
    if f_high == 0:
        return high
    if (f_low > 0) == (f_high > 0):
        return None
    while 1 < high - low:
        middle = (low + high) // 2
        f_middle = value(middle)
        if f_middle == 0:
            return middle
        if (f_middle > 0) == (f_low > 0):
            low, f_low = middle, f_middle
        else:
            high = middle
    return None


def _integer_roots(coefficients: typing.List[int]) -> typing.List[int]:
    """
    Integer roots of x^3 + c2 x^2 + c1 x + c0, coefficients highest degree first.
    Exact at any size: bisection between the critical points.
    """
    one, c2, c1, c0 = coefficients
    if one != 1:
        raise ValueError(f"Polynomial must be monic, got leading coefficient {one}")

    def value(x: int) -> int:
        return ((x + c2) * x + c1) * x + c0

    # every root lies in (-bound, bound)
    bound = 1 + max(abs(c2), abs(c1), abs(c0))
    roots = set()
    d = c2 * c2 - 3 * c1
    if d <= 0:
        segments = [(-bound, bound)]
    else:
        # critical points (-c2 -+ sqrt(d)) / 3 lie strictly inside the gaps
        s = math.isqrt(d)
        gaps = [
            ((-c2 - s - 1) // 3 - 1, (-c2 - s) // 3 + 2),
            ((-c2 + s) // 3 - 1, (-c2 + s + 1) // 3 + 2),
        ]
        for low, high in gaps:
            roots.update(x for x in range(low, high + 1) if value(x) == 0)
        segments = [
            (-bound, gaps[0][0]),
            (gaps[0][1], gaps[1][0]),
            (gaps[1][1], bound),
        ]
    for low, high in segments:
        root = _monotone_root(value, low, high)
        if root is not None:
            roots.add(root)
    return sorted(roots)


def verify_two_torsion(u: int, curve_index: int) -> bool:
    """
    Whether the model has exactly one rational point of order two, and no
    rational point of order four
    """
    m = model(u, curve_index)
    # Y^2 = X^3 + b2 X^2 + 8 b4 X + 16 b6 with X = 4x, Y = 4(2y + a1 x + a3)
    c2, c1, c0 = m.b2, 8 * m.b4, 16 * m.b6
    roots = _integer_roots([1, c2, c1, c0])
    if len(roots) != 1:
        return False
    r = roots[0]

    # shift the 2-torsion point to the origin: Y^2 = X (X^2 + a X + b)
    a = 2 * r + (c2 + r)
    b = r * r + (c2 + r) * r + (c1 + r * (c2 + r))
    if not is_square(b):
        return True
    d = math.isqrt(b)
    return not (is_square(a + 2 * d) or is_square(a - 2 * d))
