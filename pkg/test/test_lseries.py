import math

import numpy
import pytest

from setzer_sha.arith import legendre, prime_sieve
from setzer_sha.curves import classify, model
from setzer_sha.error import PrecisionError, RejectedCurveError, WrongSignError
from setzer_sha.frobenius import trace_of_frobenius
from setzer_sha.lseries import (
    BSGS_MIN_PRIME,
    ApCache,
    LValueKind,
    an_stream,
    ap,
    l_at_1,
    lprime_at_1,
    tail_bound,
    tail_terms,
    terms_needed,
)


def test_ap():
    assert ap(5, 2) == 1
    assert ap(5, 3) == 2
    assert ap(5, 5) == -2
    assert ap(5, 7) == 2


def test_ap_bad_prime():
    assert ap(5, 89) == 1
    assert ap(1, 5) == -1
    assert ap(1, 13) == -1
    assert ap(-51, 5) == -1
    assert ap(-51, 13) == -1
    assert ap(-51, 41) == 1


def _count_ap(u: int, p: int) -> int:
    # p minus the affine points, singular point included
    curve = model(u, 1)
    points = sum(curve.on_curve(x, y, p) for x in range(p) for y in range(p))
    return p - points


@pytest.mark.parametrize(
    "u, p", [(1, 5), (1, 13), (-51, 5), (-51, 13), (-51, 41), (5, 89), (4993, 269)]
)
def test_ap_bad_prime_point_count(u, p):
    assert (u * u + 64) % p == 0
    assert ap(u, p) == _count_ap(u, p)


def test_ap_point_count():
    for u in (-51, 1, 5, 4993):
        for p in (3, 7, 11, 17, 19, 23, 29, 31):
            if (u * u + 64) % p:
                assert ap(u, p) == _count_ap(u, p), (u, p)


def test_ap_supersingular():
    assert ap(21, 3) == 0


def test_ap_hasse_bound():
    for p in (101, 103, 1009):
        assert (ap(-51, p) ** 2) <= 4 * p


def test_ap_cache():
    cache = ApCache(16)
    for p in (2, 3, 5, 7, 11, 13):
        assert ap(5, p, cache) == ap(5, p)
    hits = cache.hits
    # 33 = 5 mod 7
    assert ap(33, 7, cache) == ap(5, 7)
    assert cache.hits == hits + 1


def test_an_stream():
    assert an_stream(5, 10) == [0, 1, 1, 2, -1, -2, 2, 2, -3, 1, -2]


def test_an_stream_multiplicative():
    a = an_stream(-51, 200)
    assert a[6] == a[2] * a[3]
    assert a[5] == -1
    assert a[25] == 1
    assert a[125] == -1
    assert a[41] == 1
    assert a[65] == a[5] * a[13]
    assert a[196] == a[4] * a[49]


def test_an_stream_invalid():
    with pytest.raises(ValueError):
        an_stream(5, 0)


def test_terms_needed():
    assert terms_needed(89) == 6
    assert terms_needed(65) == 5


def test_tail_bound_decreasing():
    bounds = [tail_bound(2665, m, LValueKind.L_AT_1) for m in (10, 20, 40)]
    assert bounds[0] > bounds[1] > bounds[2]
    assert tail_bound(2665, 20, LValueKind.LPRIME_AT_1) < bounds[1]


def test_tail_terms():
    for kind in LValueKind:
        m = tail_terms(2665, 1e-12, kind)
        assert tail_bound(2665, m, kind) < 1e-12
        assert tail_bound(2665, m - 1, kind) >= 1e-12


def test_l_at_1():
    result = l_at_1(5)
    assert result.kind == LValueKind.L_AT_1
    assert float(result.value) == pytest.approx(1.4223, rel=1e-3)
    assert result.tail_bound < 1e-10
    assert result.precision_bits == 96


def test_l_at_1_term_scale():
    single = l_at_1(5, tail_tolerance=1e-20)
    double = l_at_1(5, term_scale=2, tail_tolerance=1e-20)
    assert double.terms_used == 2 * single.terms_used
    assert abs(double.value - single.value) < 1e-18


def test_l_at_1_wrong_sign():
    with pytest.raises(WrongSignError, match="u=1"):
        l_at_1(1)


def test_l_at_1_rejected():
    with pytest.raises(RejectedCurveError):
        l_at_1(81)


def test_l_at_1_tail_too_large():
    with pytest.raises(PrecisionError):
        l_at_1(5, tail_tolerance=1.0)


def test_lprime_at_1():
    result = lprime_at_1(1, classify(1))
    assert result.kind == LValueKind.LPRIME_AT_1
    assert result.value > 0


def test_lprime_at_1_wrong_sign():
    with pytest.raises(WrongSignError):
        lprime_at_1(5)


def _character_sum(a2: int, a4: int, p: int) -> int:
    return -sum(legendre(x * x * x + a2 * x * x + a4 * x, p) for x in range(p))


def test_trace_of_frobenius():
    primes = [p for p in prime_sieve(BSGS_MIN_PRIME + 200) if BSGS_MIN_PRIME < p]
    for u in (5, -51, 4993):
        for p in primes[:6]:
            if (u * u + 64) % p == 0:
                continue
            a2 = u * pow(4, -1, p) % p
            expected = _character_sum(a2, p - 1, p)
            assert trace_of_frobenius(a2, p - 1, p) == expected, (u, p)
            assert ap(u, p) == expected, (u, p)


def test_ap_even_order():
    # the 2-torsion point (0, 0) makes #E(F_p) = p + 1 - a_p even
    for u in (-51, 1, 5, 97):
        for p in prime_sieve(300)[1:]:
            if (u * u + 64) % p:
                assert (p + 1 - ap(u, p)) % 2 == 0, (u, p)


def test_ap_periodic():
    for p in (3, 7, 11, 101):
        for u in (5, -51, 97):
            if (u * u + 64) % p == 0:
                continue
            shifted = u + 4 * p
            assert ap(shifted, p) == ap(u, p), (u, p)


def test_an_stream_agrees_with_ap():
    u = -51
    a = an_stream(u, 500)
    for p in prime_sieve(500):
        assert a[p] == ap(u, p)
    # Hecke recurrence at a good prime
    assert a[9] == a[3] * a[3] - 3
    assert a[27] == a[3] * a[9] - 3 * a[3]


def test_terms_needed_random():
    rng = numpy.random.default_rng(1)
    for n in rng.integers(65, 10**16, size=100).tolist():
        m = terms_needed(n)
        target = math.sqrt(n) * math.log(n) / 8
        assert m - 1 < target <= m
