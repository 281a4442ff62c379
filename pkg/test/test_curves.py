import pytest

from setzer_sha.curves import (
    CurveClass,
    RejectReason,
    _integer_roots,
    classify,
    invariants,
    model,
    root_number,
    verify_two_torsion,
)
from setzer_sha.error import BadResidueError, RejectedCurveError


def test_classify(snapshot):
    curves = [classify(u) for u in (5, -51, 1, 3, 81)]
    snapshot.assert_match([c.to_dict(encode_json=True) for c in curves])


def test_classify_prime_conductors():
    for u in (5, -3, -7, 13, 17):
        curve = classify(u)
        assert curve.curve_class == CurveClass.STAR
        assert curve.epsilon == 1


def test_classify_square_conductor():
    curve = classify(-15)
    assert curve.n == 289
    assert curve.curve_class == CurveClass.REJECTED
    assert curve.reason == RejectReason.NOT_SQUAREFREE
    assert not curve.accepted


def test_classify_limit():
    with pytest.raises(ValueError):
        classify(2**51 + 1)


def test_root_number():
    assert root_number(1) == 1
    assert root_number(2) == -1
    assert root_number(3) == 1
    with pytest.raises(ValueError):
        root_number(0)


def test_model_discriminant():
    assert model(5, 1).discriminant == 89
    assert model(5, 2).discriminant == -(89**2)
    assert model(-51, 2).discriminant == -(2665**2)


def test_model_bad_residue():
    with pytest.raises(BadResidueError, match="u=7"):
        model(7, 1)


def test_model_two_torsion_point():
    for u in (5, -51, 1):
        assert model(u, 1).on_curve(0, 0, 1000003)


def test_invariants():
    result = invariants(classify(-51))
    assert result.torsion_order == 2
    assert result.cfin1 == 1
    assert result.cfin2 == 8
    assert result.rank_bound == 2


def test_invariants_rejected():
    with pytest.raises(RejectedCurveError):
        invariants(classify(81))


def test_verify_two_torsion():
    for u in (5, -3, -51, 1):
        assert verify_two_torsion(u, 1)
        assert verify_two_torsion(u, 2)


def test_verify_two_torsion_large():
    for u in (2**50 - 3, -(2**50) + 1, 2**49 + 1):
        assert verify_two_torsion(u, 1)
        assert verify_two_torsion(u, 2)


def _cubic(r1, r2, r3):
    return [1, -(r1 + r2 + r3), r1 * r2 + r1 * r3 + r2 * r3, -r1 * r2 * r3]


def test_integer_roots():
    assert _integer_roots(_cubic(0, 1, -1)) == [-1, 0, 1]
    assert _integer_roots(_cubic(2, 2, 2)) == [2]
    assert _integer_roots(_cubic(-5, 3, 3)) == [-5, 3]
    # x^3 + 2: no rational root
    assert _integer_roots([1, 0, 0, 2]) == []
    # (x - 7)(x^2 + 1)
    assert _integer_roots([1, -7, 1, -7]) == [7]


def test_integer_roots_beyond_float_precision():
    big = 2**100 + 1
    assert _integer_roots(_cubic(big, big + 1, -big)) == [-big, big, big + 1]
    # x (x^2 + big), the neighbours of 0 are not roots
    assert _integer_roots([1, 0, big, 0]) == [0]
    with pytest.raises(ValueError):
        _integer_roots([2, 0, 0, 0])
