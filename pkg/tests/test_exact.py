from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gamma14.exact import (DomainError, Enclosure, Ordering, RootAffine, as_rational, cmp_to_root,
                           enclosure_eval, exact_root, normalize_half, parse_expr, root_enclosure)

F = Fraction
positive = st.fractions(min_value=F(1, 1000), max_value=100, max_denominator=1000)


@pytest.mark.parametrize("v, n, r, expected", [
    (F(1, 2), 5, F(1, 32), Ordering.EQUAL),
    (F(1), 5, F(1, 32), Ordering.GREATER),
    (F(3, 5), 3, F(27, 125), Ordering.EQUAL),
    (F(1, 3), 2, F(1, 8), Ordering.LESS),
])
def test_cmp_to_root_examples(v, n, r, expected):
    assert cmp_to_root(v, n, r) is expected


def test_cmp_to_root_rejects_nonpositive():
    with pytest.raises(ValueError):
        cmp_to_root(0, 5, 1)


def test_as_rational_refuses_floats():
    with pytest.raises(TypeError):
        as_rational(0.5)
    assert as_rational("0.44445") == F(44445, 100000)
    assert as_rational("3/8") == F(3, 8)


def test_root_enclosure_examples():
    assert root_enclosure(F(1, 32), 5, F(1, 1000)) == Enclosure(F(1, 2), F(1, 2))
    assert root_enclosure(0, 3, F(1, 10)) == Enclosure(0, 0)
    e = root_enclosure(2, 2, F(1, 100))
    assert e.width <= F(1, 100)
    assert e.lo ** 2 <= 2 <= e.hi ** 2


def test_root_enclosure_domain():
    with pytest.raises(DomainError):
        root_enclosure(-1, 3, F(1, 10))


@given(positive, st.integers(1, 6), st.integers(1, 60))
def test_root_enclosure_brackets_and_nests(r, n, bits):
    w = F(1, 2 ** bits)
    e = root_enclosure(r, n, w)
    assert e.width <= w
    assert e.lo ** n <= r <= e.hi ** n
    inner = root_enclosure(r, n, w / 2)
    assert e.contains(inner)


@given(positive, st.integers(1, 6))
def test_exact_root_roundtrip(x, n):
    assert exact_root(x ** n, n) == x


@given(st.fractions(min_value=-50, max_value=50, max_denominator=200))
def test_normalize_half_range(x):
    y = normalize_half(x)
    assert F(-1, 2) < y <= F(1, 2)
    assert (x - y).denominator == 1


def test_enclosure_eval_identity():
    e = Enclosure(F(1, 4), F(1, 2))
    assert enclosure_eval(parse_expr("t"), e) == e


def test_enclosure_eval_lemma5_bound():
    # the max is 3/4 * (16/27)^(1/3)... at t = 27/128: (2t/3)^(1/3) = (9/64)^(1/3)
    t = F(27, 128)
    e = enclosure_eval(parse_expr("max(1/2, (2*t/3)^(1/3))"), Enclosure(t, t), bits=80)
    # independent check by bisection on floats
    ref = max(0.5, (2 * float(t) / 3) ** (1 / 3))
    assert float(e.lo) <= ref + 1e-15 and ref - 1e-15 <= float(e.hi)
    assert e.width < F(1, 10 ** 20)


def test_enclosure_eval_distance_term():
    e = enclosure_eval(parse_expr("abs(4 - 9*t) + 1/2"), Enclosure(F("0.42692"), F("0.44445")))
    assert abs(e.lo - F(1, 2)) <= F(1, 10 ** 4)
    assert abs(e.hi - F("0.65772")) <= F(1, 10 ** 4)


@given(positive, positive)
def test_enclosure_arithmetic_contains_points(a, b):
    x, y = Enclosure(a, a + 1), Enclosure(b, b + 2)
    assert (x + y).contains(a + b)
    assert (x * y).contains(a * b)
    assert (x - y).contains(a - b)
    assert (x / y).contains(a / b)


def test_root_affine_orders_exactly():
    d = RootAffine.root(F(3, 4), 5)
    assert d < 1
    assert d > F(94, 100)
    assert (d + F(1, 2)) - d == F(1, 2)
    assert not d.exact()
    half = RootAffine.root(F(1, 32), 5)
    assert half == F(1, 2)
