"""
Trace of Frobenius on y^2 = x^3 + a2 x^2 + a4 x over F_p by baby-step
giant-step, drawing points from the curve and its quadratic twists
"""

import math
import typing

from .arith import legendre

MAX_POINTS = 32
"""Points tried before giving up on an ambiguous trace"""

Point = typing.Optional[typing.Tuple[int, int]]


class _Curve:
    """
    Affine group law. None is the point at infinity.
    """

    def __init__(self, a2: int, a4: int, p: int):
        self.a2 = a2
        self.a4 = a4
        self.p = p

    def neg(self, point: Point) -> Point:
        if point is None:
            return None
        x, y = point
        return x, -y % self.p

    def add(self, s: Point, t: Point) -> Point:
        if s is None:
            return t
        if t is None:
            return s
        p = self.p
        x1, y1 = s
        x2, y2 = t
        if x1 == x2:
            if (y1 + y2) % p == 0:
                return None
            slope = (3 * x1 * x1 + 2 * self.a2 * x1 + self.a4) * pow(2 * y1, -1, p)
        else:
            slope = (y2 - y1) * pow(x2 - x1, -1, p)
        slope %= p
        x3 = (slope * slope - self.a2 - x1 - x2) % p
        return x3, (slope * (x1 - x3) - y1) % p

    def mul(self, k: int, point: Point) -> Point:
        if k < 0:
            k, point = -k, self.neg(point)
        result = None
        while k:
            if k & 1:
                result = self.add(result, point)
            k >>= 1
            if k:
                point = self.add(point, point)
        return result


def _traces(
    curve: _Curve, point: Point, bound: int
) -> typing.Optional[typing.Set[int]]:
    """
    Every t with |t| <= bound and (p + 1 - t) point = O, or None when the
    point has order at most 2m and the baby steps would be ambiguous
    """
    m = math.isqrt(bound) + 1
    baby: typing.Dict[int, typing.Tuple[int, int]] = {}
    q = None
    for j in range(1, m + 1):
        q = curve.add(q, point)
        if q is None or q[0] in baby:
            return None
        baby[q[0]] = (j, q[1])
    if q[1] == 0:
        return None

    step = 2 * m + 1
    giant = curve.mul(step, point)
    reach = bound // step + 1
    # s = (p + 1 - i step) point, for i from -reach upwards
    s = curve.add(curve.mul(curve.p + 1, point), curve.mul(reach, giant))
    back = curve.neg(giant)
    traces = set()
    for i in range(-reach, reach + 1):
        if s is None:
            t = i * step
        elif s[0] in baby:
            j, y = baby[s[0]]
            t = i * step + (j if y == s[1] else -j)
        else:
            t = None
        if t is not None and abs(t) <= bound:
            traces.add(t)
        s = curve.add(s, back)
    return traces


def trace_of_frobenius(a2: int, a4: int, p: int) -> typing.Optional[int]:
    """
    p + 1 - #E(F_p) for E: y^2 = x^3 + a2 x^2 + a4 x with good reduction at
    the odd prime p, or None if MAX_POINTS points leave it ambiguous
    """
    bound = math.isqrt(4 * p)
    candidates: typing.Optional[typing.Set[int]] = None
    tried = 0
    for x in range(1, p):
        d = (x * x * x + a2 * x * x + a4 * x) % p
        if d == 0:
            continue
        # (d x, d^2) lies on y^2 = x^3 + a2 d x^2 + a4 d^2 x, the twist by d,
        # whose trace is legendre(d, p) times that of E
        twist = _Curve(a2 * d % p, a4 * d * d % p, p)
        traces = _traces(twist, (d * x % p, d * d % p), bound)
        if traces is not None:
            sign = legendre(d, p)
            found = {sign * t for t in traces}
            candidates = found if candidates is None else candidates & found
            if len(candidates) == 1:
                return candidates.pop()
            if not candidates:
                return None
        tried += 1
        if tried == MAX_POINTS:
            break
    return None
