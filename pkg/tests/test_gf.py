import random

import pytest

from rsplfr.gf import (DivisionByZero, FieldMismatch, UnsupportedCardinality,
                       field_new)

SMALL_SUPPORTED = [2, 3, 4, 5, 7, 8, 11, 13, 16]


def test_field_new_basic():
    f2 = field_new(2)
    assert (f2.q, f2.characteristic, f2.extension_degree) == (2, 2, 1)
    assert f2.reduction_polynomial is None

    f5 = field_new(5)
    assert (f5.q, f5.characteristic, f5.extension_degree) == (5, 5, 1)

    f4 = field_new(4)
    assert (f4.q, f4.characteristic, f4.extension_degree) == (4, 2, 2)
    # x^2 + x + 1, coefficients low to high
    assert f4.reduction_polynomial == (1, 1, 1)


@pytest.mark.parametrize("q", [1, 6, 9, 10, 12, 15, 100, 2 ** 17])
def test_unsupported_cardinalities(q):
    with pytest.raises(UnsupportedCardinality):
        field_new(q)


def test_known_values():
    f2 = field_new(2)
    assert (f2(1) + f2(1)).value == 0
    f5 = field_new(5)
    assert (f5(3) * f5(4)).value == 2
    f4 = field_new(4)
    alpha = f4(2)
    assert (alpha * alpha).value == 3  # alpha^2 = alpha + 1 under x^2+x+1


def test_field_mismatch_is_hard_error():
    a = field_new(5)(2)
    b = field_new(7)(2)
    with pytest.raises(FieldMismatch):
        _ = a + b
    with pytest.raises(FieldMismatch):
        _ = a == b


def test_inverse_of_zero():
    f = field_new(8)
    with pytest.raises(DivisionByZero):
        f.inv(0)
    with pytest.raises(DivisionByZero):
        _ = f(1) / f(0)


def test_prime_field_canonicalizes_ints():
    f = field_new(7)
    assert f(9).value == 2
    assert f(-1).value == 6


def test_extension_field_rejects_out_of_range():
    f = field_new(4)
    with pytest.raises(ValueError):
        f(4)


@pytest.mark.parametrize("q", SMALL_SUPPORTED)
def test_axioms_exhaustive_small_fields(q):
    f = field_new(q)
    add, mul, inv = f.add, f.mul, f.inv
    for a in range(q):
        # additive/multiplicative identities and inverses
        assert add(a, 0) == a
        assert mul(a, 1) == a
        assert add(a, f.neg(a)) == 0
        if a != 0:
            assert mul(a, inv(a)) == 1
            assert f.pow(a, q - 1) == 1
        for b in range(q):
            assert add(a, b) == add(b, a)
            assert mul(a, b) == mul(b, a)
            for c in range(q):
                assert add(add(a, b), c) == add(a, add(b, c))
                assert mul(mul(a, b), c) == mul(a, mul(b, c))
                assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))


@pytest.mark.parametrize("q", [23, 64, 251, 256, 1024, 65536])
def test_axioms_randomized_larger_fields(q):
    f = field_new(q)
    rng = random.Random(q)
    for _ in range(300):
        a, b, c = (rng.randrange(q) for _ in range(3))
        assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
        assert f.sub(f.add(a, b), b) == a
        if a != 0:
            assert f.mul(a, f.inv(a)) == 1
            assert f.pow(a, q - 1) == 1
            assert f.div(f.mul(a, b), a) == b


def test_pow_edge_cases():
    f = field_new(8)
    assert f.pow(0, 0) == 1
    assert f.pow(0, 5) == 0
    assert f.pow(3, -1) == f.inv(3)
    e = f(3)
    assert (e ** 0).value == 1
    assert (e ** (f.q - 1)).value == 1


def test_element_operators_round_trip():
    f = field_new(13)
    rng = random.Random(0)
    for _ in range(50):
        a, b = f(rng.randrange(13)), f(rng.randrange(1, 13))
        assert ((a / b) * b) == a
        assert (a - b + b) == a
        assert (-(-a)) == a
        assert bool(f(0)) is False and bool(f(1)) is True


def test_elements_iterator_and_repr():
    f = field_new(4)
    vals = [e.value for e in f.elements()]
    assert vals == [0, 1, 2, 3]
    assert "GF" in repr(f(2))
