import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gamma14.forms import (FormError, QForm, ShiftedInstance, apply_unimodular, check_witness, d_value, determinant,
                           evaluate, form_determinant, form_from_polynomial, signature, to_matrix)
from gamma14.exact import Enclosure

F = Fraction
Q1 = form_from_polynomial("(x1 - x2/4)*x2 - (x3**2 + x4**2 + x5**2)/4", 5)
Q2 = form_from_polynomial("x1*x2 - (x3**2 + x4**2 + x5**2) - (x3*x4 + x3*x5 + x4*x5)", 5)
DIAG = QForm(to_matrix([[1 if i == j == 0 else (-1 if i == j else 0) for j in range(5)] for i in range(5)]))
HALF = F(1, 2)


def test_evaluate_examples():
    assert evaluate(Q1, [HALF] * 5) == 0
    assert evaluate(Q1, [F(3, 2)] + [HALF] * 4) == HALF
    assert evaluate(Q2, [0] * 5) == 0


def test_determinants():
    assert form_determinant(Q1) == F(1, 256)
    assert form_determinant(Q2) == F(1, 8)
    assert form_determinant(DIAG) == 1


def test_signatures():
    assert signature(Q1) == (1, 4)
    assert signature(-Q1) == (4, 1)
    assert signature(QForm(to_matrix([[1, 0], [0, -1]]))) == (1, 1)


def test_unimodular_examples():
    assert apply_unimodular(Q1, [[int(i == j) for j in range(5)] for i in range(5)]) == Q1
    u = [[int(i == j) for j in range(5)] for i in range(5)]
    u[1][0] = 2  # x2 -> x2 + 2 x1
    target = form_from_polynomial("x1**2 - (x2**2 + x3**2 + x4**2 + x5**2)/4", 5)
    assert apply_unimodular(Q1, u) == target


def test_unimodular_rejects_det_two():
    u = [[int(i == j) for j in range(5)] for i in range(5)]
    u[0][0] = 2
    with pytest.raises(FormError):
        apply_unimodular(Q1, u)


def test_permutation_keeps_diagonal_multiset():
    g = to_matrix([[3 if i == j == 0 else (-(i + 1) if i == j else 0) for j in range(5)] for i in range(5)])
    perm = [[1 if j == (i + 2) % 5 else 0 for j in range(5)] for i in range(5)]
    out = apply_unimodular(QForm(g), perm)
    assert sorted(out.gram[i][i] for i in range(5)) == sorted(g[i][i] for i in range(5))


def test_d_value_examples():
    c = tuple([HALF] * 5)
    assert d_value(ShiftedInstance(Q1, c, 8)) == Enclosure(HALF, HALF)
    assert d_value(ShiftedInstance(Q2, (0,) * 5, 8)) == Enclosure(1, 1)
    e = d_value(ShiftedInstance(Q1, c, F(32, 3)), F(1, 10 ** 9))
    assert e.lo ** 5 <= F(32, 3) / 256 <= e.hi ** 5


def test_asymmetric_gram_rejected():
    with pytest.raises(FormError):
        QForm(to_matrix([[1, 2], [3, 4]]))


def test_polynomial_must_be_quadratic():
    with pytest.raises(FormError):
        form_from_polynomial("x1*x2 + x1", 2)


def test_instance_json_roundtrip():
    inst = ShiftedInstance(Q1, tuple([HALF] * 5), 8)
    back = ShiftedInstance.from_json(json.loads(json.dumps(inst.to_json())))
    assert back == inst


def test_instance_from_polynomial_json():
    inst = ShiftedInstance.from_json({"polynomial": "x1*x2 - x3**2 - x4**2 - x5**2", "shift": ["1/3", 0, 0, 0, 0]})
    assert inst.form.gram[0][1] == HALF
    assert inst.shift[0] == F(1, 3)


def test_check_witness():
    inst = ShiftedInstance(Q1, tuple([HALF] * 5), 8)
    w = check_witness(inst, (1, 0, 0, 0, 0))
    assert w.value == HALF and not w.strict
    with pytest.raises(FormError):
        check_witness(inst, (0, 0, 0, 0, 0))


small = st.fractions(min_value=-4, max_value=4, max_denominator=4)


@given(st.lists(small, min_size=15, max_size=15), st.lists(st.integers(-5, 5), min_size=5, max_size=5))
def test_evaluate_matches_polynomial_expansion(entries, x):
    it = iter(entries)
    g = [[F(0)] * 5 for _ in range(5)]
    for i in range(5):
        for j in range(i, 5):
            g[i][j] = g[j][i] = next(it)
    q = QForm(g)
    direct = sum(g[i][j] * x[i] * x[j] for i in range(5) for j in range(5))
    assert evaluate(q, x) == direct


@given(st.lists(st.integers(-3, 3), min_size=25, max_size=25))
def test_determinant_multiplicative_under_scaling(vals):
    g = [[F(vals[5 * i + j] + vals[5 * j + i]) for j in range(5)] for i in range(5)]
    assert determinant([[2 * x for x in row] for row in g]) == 32 * determinant(g)
