import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gamma14.forms import GAMMA_8, QForm, evaluate, form_from_polynomial, matvec, signature, to_matrix, determinant
from gamma14.reduction import (NotFoundWithinRadius, a2ppp_printed, binary_reduce, birch_reduce, case_params,
                               find_isotropic, normalize_phi, ternary_minimum)
from gamma14.sampling import random_type14_form

F = Fraction
Q1 = form_from_polynomial("(x1 - x2/4)*x2 - (x3**2 + x4**2 + x5**2)/4", 5)
Q2 = form_from_polynomial("x1*x2 - (x3**2 + x4**2 + x5**2) - (x3*x4 + x3*x5 + x4*x5)", 5)
HEX = form_from_polynomial("x1**2 + x2**2 + x3**2 + x1*x2 + x2*x3 + x1*x3", 3)


def diag(*xs):
    return QForm(to_matrix([[xs[i] if i == j else 0 for j in range(len(xs))] for i in range(len(xs))]))


def test_find_isotropic_examples():
    assert find_isotropic(Q2) == (1, 0, 0, 0, 0)
    v = find_isotropic(diag(1, -1, -1, -1, -1))
    assert evaluate(diag(1, -1, -1, -1, -1), v) == 0
    assert sorted(map(abs, v)) == [0, 0, 0, 1, 1]


def test_find_isotropic_three_adic_obstruction():
    with pytest.raises(NotFoundWithinRadius):
        find_isotropic(diag(1, 1, -3), search_radius=12)


def test_birch_reduce_q2():
    bf = birch_reduce(Q2, (1, 0, 0, 0, 0))
    assert (bf.a2, bf.a3, bf.a4, bf.a5) == (0, 0, 0, 0)
    assert bf.a == 1
    assert bf.phi == HEX
    assert (bf.h4, bf.h5) == (F(1, 2), F(1, 2))


def test_birch_reduce_q1():
    bf = birch_reduce(Q1, (1, 0, 0, 0, 0))
    assert bf.scale == 1
    assert bf.a2 == F(-1, 4)
    assert bf.phi == diag(F(1, 4), F(1, 4), F(1, 4))


def test_ternary_minimum_examples():
    assert ternary_minimum(HEX) == (1, (1, 0, 0))
    assert ternary_minimum(diag(2, 3, 5)) == (2, (1, 0, 0))
    val, v = ternary_minimum(diag(F(1, 4), F(1, 4), F(1, 4)))
    assert val == F(1, 4) and sorted(map(abs, v)) == [0, 0, 1]


def test_normalize_phi_examples():
    a, h4, h5, psi, _ = normalize_phi(diag(1, 1, 1), (1, 0, 0))
    assert (a, h4, h5) == (1, 0, 0)
    assert psi == diag(1, 1)
    a, h4, h5, psi, _ = normalize_phi(HEX, (1, 0, 0))
    assert a == 1
    assert (abs(h4), abs(h5)) == (F(1, 2), F(1, 2))
    assert a * determinant(psi.gram) == determinant(HEX.gram)


def test_binary_reduce_examples():
    r = binary_reduce(diag(1, 1))
    assert (r.A, r.B, r.C, r.lam, r.t) == (1, 0, 1, 0, 1)
    A = F(2, 3)
    r = binary_reduce(QForm(to_matrix([[A, A / 2], [A / 2, A]])))
    assert (r.A, r.B, r.C, r.lam, r.t) == (A, A, A, F(1, 2), F(3, 4) * A)
    assert r.A * r.C == F(4, 3) * determinant([[r.A, r.B / 2], [r.B / 2, r.C]])
    r = binary_reduce(QForm(to_matrix([[5, 4], [4, 5]])))
    assert (r.A, r.B, r.C) == (2, 2, 5)


def test_case_params_examples():
    p2 = case_params(birch_reduce(Q2), GAMMA_8)
    assert p2.a_equals_d and p2.m == 0
    p1 = case_params(birch_reduce(Q1), GAMMA_8)
    assert p1.m == 1
    assert a2ppp_printed(F(0), F(1, 2), F(1, 2)) == F(1, 4)


def _random_forms(seed, count):
    rng = random.Random(seed)
    return [random_type14_form(rng) for _ in range(count)]


@pytest.mark.parametrize("form", _random_forms(11, 12))
def test_birch_round_trip_values(form):
    bf = birch_reduce(form)
    rng = random.Random(5)
    for _ in range(500 // 12 + 1):
        x = [rng.randint(-6, 6) for _ in range(5)]
        z = matvec(bf.transform, x)
        assert evaluate(form, x) == bf.scale * bf.value_at(z)


@pytest.mark.parametrize("form", _random_forms(12, 12))
def test_birch_invariants(form):
    bf = birch_reduce(form)
    bf.check_invariants()
    assert 0 <= bf.B <= bf.A <= bf.C
    assert 0 <= bf.lam <= F(1, 2)
    assert bf.C == bf.t + bf.A * bf.lam ** 2
    assert 3 * bf.A * bf.C <= 4 * determinant(bf.psi.gram)
    if bf.h4 == 0:
        assert bf.A >= bf.a
    assert 4 * bf.A >= 3 * bf.a


def _brute_min(phi, radius):
    best = None
    for v in itertools.product(range(-radius, radius + 1), repeat=3):
        if any(v):
            val = evaluate(phi, v)
            best = val if best is None else min(best, val)
    return best


@settings(max_examples=60)
@given(st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_ternary_minimum_is_exhaustive(vals):
    a, b, c, d, e, f = vals
    g = [[F(abs(a) + 4), F(d, 2), F(e, 2)], [F(d, 2), F(abs(b) + 4), F(f, 2)], [F(e, 2), F(f, 2), F(abs(c) + 4)]]
    phi = QForm(g)
    if signature(phi) != (3, 0):
        return
    val, v = ternary_minimum(phi)
    assert evaluate(phi, v) == val
    assert _brute_min(phi, 3) == val


@given(st.integers(1, 30), st.integers(-40, 40), st.integers(1, 30))
def test_binary_reduce_properties(a, b, c):
    if 4 * a * c - b * b <= 0:
        return
    psi = QForm(to_matrix([[a, F(b, 2)], [F(b, 2), c]]))
    r = binary_reduce(psi)
    assert 0 <= r.B <= r.A <= r.C
    assert 0 <= r.lam <= F(1, 2)
    assert r.C == r.t + r.A * r.lam ** 2
    assert r.A * r.C <= F(4, 3) * determinant(psi.gram)
    assert r.A * r.t == determinant(psi.gram)
