"""
Real period of the Neron differential of E1(u), shared with E2(u)
"""

import dataclasses
import logging

import mpmath

from .curves import check_residue
from .log import TRACE
from .special import agm, agm_iterations


@dataclasses.dataclass(frozen=True)
class PeriodResult:
    omega: mpmath.mpf
    e1: mpmath.mpf
    e2: mpmath.mpf
    e3: mpmath.mpf
    """Roots of x^3 + (u/4) x^2 - x, descending"""
    agm_iterations: int
    precision_bits: int


def real_period(u: int, precision_bits: int = 96) -> PeriodResult:
    """
    Omega = pi / AGM(sqrt(e1 - e3), sqrt(e1 - e2)).

    The roots are 0 and (-u +- sqrt(u^2 + 64)) / 8; each is taken in the
    form that avoids cancellation.
    """
    check_residue(u)
    with mpmath.workprec(precision_bits + 16):
        s = mpmath.sqrt(u * u + 64)
        if 0 <= u:
            e1 = 8 / (s + u)
            e3 = -(s + u) / 8
        else:
            e1 = (s - u) / 8
            e3 = -8 / (s - u)
        e2 = mpmath.mpf(0)
        mean, iterations = agm_iterations(
            mpmath.sqrt(s / 4), mpmath.sqrt(e1), precision_bits
        )
        omega = mpmath.pi / mean
    logging.log(
        TRACE, "u=%d: omega %s (%d AGM steps)", u, mpmath.nstr(omega, 12), iterations
    )
    return PeriodResult(
        omega=omega,
        e1=e1,
        e2=e2,
        e3=e3,
        agm_iterations=iterations,
        precision_bits=precision_bits,
    )


def real_period_e2(u: int, precision_bits: int = 96) -> mpmath.mpf:
    """
    Omega of E2(u) from its own model. The cubic (x + u/4)(x^2 + 4) has one
    real root, so Omega = 2 pi / AGM(2 sqrt(b), sqrt(2b + a)) with
    a = 3 e + u/4 and b = sqrt(3 e^2 + (u/2) e + 4), e = -u/4.
    """
    check_residue(u)
    with mpmath.workprec(precision_bits + 16):
        s = mpmath.sqrt(u * u + 64)
        # 2b + a = (s - u) / 2
        t = 64 / (s + u) if 0 <= u else s - u
        return 2 * mpmath.pi / agm(mpmath.sqrt(s), mpmath.sqrt(t / 2), precision_bits)


def c_infty(u: int, curve_index: int, precision_bits: int = 96) -> mpmath.mpf:
    """
    Real Tamagawa factor: 2 Omega for E1 (two real components), Omega for E2
    """
    if curve_index not in (1, 2):
        raise ValueError(f"Invalid curve index {curve_index}")
    omega = real_period(u, precision_bits).omega
    with mpmath.workprec(precision_bits + 16):
        return 2 * omega if curve_index == 1 else omega
