"""
Special functions evaluated in extended precision
"""

import mpmath

from .error import NoConvergenceError

AGM_MAX_ITERATIONS = 64

SERIES_MAX_TERMS = 10_000


def exponential_integral(x, precision_bits: int = 96) -> mpmath.mpf:
    """
    E1(x) = integral from x to infinity of e^-t / t, for x > 0.

    Power series for x <= 1, continued fraction (modified Lentz) otherwise.
    """
    with mpmath.workprec(precision_bits + 16):
        x = mpmath.mpf(x)
        if x <= 0:
            raise ValueError(f"E1 argument must be positive, got {x}")
        eps = mpmath.ldexp(1, -precision_bits - 4)
        if x <= 1:
            result = _e1_series(x, eps)
        else:
            result = _e1_continued_fraction(x, eps)
    return result


def _e1_series(x, eps):
    # E1(x) = -gamma - ln x - sum (-x)^k / (k k!)
    total = mpmath.mpf(0)
    term = mpmath.mpf(1)
    for k in range(1, SERIES_MAX_TERMS):
        term *= -x / k
        contribution = term / k
        total += contribution
        if abs(contribution) < eps * abs(total):
            return -mpmath.euler - mpmath.log(x) - total
    raise NoConvergenceError(f"E1 series did not converge at x={x}")


def _e1_continued_fraction(x, eps):
    # E1(x) = e^-x / (x + 1 - 1^2 / (x + 3 - 2^2 / (x + 5 - ...)))
    tiny = mpmath.ldexp(1, -4 * mpmath.mp.prec)
    b = x + 1
    c = 1 / tiny
    d = 1 / b
    h = d
    for i in range(1, SERIES_MAX_TERMS):
        a = -i * i
        b += 2
        d = 1 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1) < eps:
            return h * mpmath.exp(-x)
    raise NoConvergenceError(f"E1 continued fraction did not converge at x={x}")


def agm(a, b, precision_bits: int = 96) -> mpmath.mpf:
    """
    Arithmetic-geometric mean of positive a, b
    """
    mean, _ = agm_iterations(a, b, precision_bits)
    return mean


def agm_iterations(a, b, precision_bits: int = 96):
    """
    Arithmetic-geometric mean, and the number of iterations needed
    """
    with mpmath.workprec(precision_bits + 16):
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        if a <= 0 or b <= 0:
            raise ValueError(f"AGM arguments must be positive, got {a}, {b}")
        eps = mpmath.ldexp(1, -precision_bits)
        for i in range(AGM_MAX_ITERATIONS + 1):
            if abs(a - b) <= eps * a:
                return a, i
            a, b = (a + b) / 2, mpmath.sqrt(a * b)
    raise NoConvergenceError(
        f"AGM did not converge within {AGM_MAX_ITERATIONS} iterations"
    )
