import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gamma14.lemmas import (GStarData, HypothesisFails, Macbeath2Status, MacbeathProblem, MacbeathStatus, gstar_transform,
                            in_lattice, jackson_solve, macbeath1_check, macbeath1_solve, macbeath2_check,
                            rational_gcd, residue_candidates, squeeze_solve, trivial_solve)
from gamma14.forms import QForm

import lemma_cases as lc

F = Fraction
HALF = F(1, 2)


def test_squeeze_examples():
    r = squeeze_solve(0, 1, 1, 0)
    assert (r.x, r.value) == (0, 1)
    r = squeeze_solve(0, F(5, 4), 1, HALF)
    assert r.x in (HALF, -HALF) and r.value == 1
    with pytest.raises(HypothesisFails):
        squeeze_solve(0, F(1, 5), 1, 0)


XY = QForm([[F(0), HALF], [HALF, F(0)]])


def test_jackson_examples():
    c = (F(3, 10), F(7, 10))
    r = jackson_solve(XY, 0, 1, c)
    v = (r.x[0] + c[0]) * (r.x[1] + c[1])
    assert v == r.value and 0 < v <= 1
    r = jackson_solve(XY, 0, 1, (0, 0))
    assert r.value == 1 and r.x in ((1, 1), (-1, -1))
    with pytest.raises(HypothesisFails):
        jackson_solve(XY, 0, HALF, (0, 0))


def test_macbeath1_check_examples():
    p = MacbeathProblem(HALF, F(3, 10), F(9, 10), F(0), HALF, 1)
    assert macbeath1_check(p) is MacbeathStatus.STRICT_OK
    p = MacbeathProblem(HALF, HALF, F(9, 10), F(0), HALF, 1)
    assert macbeath1_check(p) is MacbeathStatus.EXCEPTIONAL_PAIR
    p = MacbeathProblem(F(2), F(0), F(1), F(0), HALF, 1)
    assert macbeath1_check(p) is MacbeathStatus.HYPOTHESIS_FAILS


def test_macbeath1_solve_examples():
    w = macbeath1_solve(MacbeathProblem(HALF, F(3, 10), F(9, 10), F(0), HALF, 1))
    assert (w.x, w.y, w.value) == (0, 1, F(4, 5))
    p = MacbeathProblem(HALF, F(0), F(1), F(1, 4), HALF, 1)
    w = macbeath1_solve(p)
    assert 0 < w.value <= 1 and w.value == p.value(w.x, w.y)
    # (0, 1) is a witness as well
    assert p.value(0, 1) == F(3, 4)


def test_macbeath1_integer_shift_of_nu_moves_x_only():
    p = MacbeathProblem(HALF, F(3, 10), F(9, 10), F(0), HALF, 1)
    q = MacbeathProblem(HALF, F(3, 10), F(9, 10), F(3), HALF, 1)
    a, b = macbeath1_solve(p), macbeath1_solve(q)
    assert (a.y, a.value) == (b.y, b.value) and a.x - b.x == 3


def test_macbeath2_examples():
    assert macbeath2_check(F(3, 16), F(1, 4), HALF, 3, 4) is Macbeath2Status.EXCEPTIONAL_RATIONAL
    assert macbeath2_check(F(3, 16), F(1, 5), HALF, 3, 4) is Macbeath2Status.OK
    t, d = F("0.19596"), F("0.5075")
    expect_ok = abs(933 - 69 ** 2 * t) <= (d / 2) ** 3
    status = macbeath2_check(t, F(1, 7), d, 933, 69)
    assert (status is Macbeath2Status.OK) == expect_ok
    assert macbeath2_check(1, F(0), HALF, 0, 1) is Macbeath2Status.HYPOTHESIS_FAILS


def test_trivial_examples():
    r = trivial_solve(0, 0, 0, HALF, 0, HALF)
    assert 0 < r.value <= HALF and r.x2 in (HALF, -HALF)
    r = trivial_solve(F(1, 3), F(1, 7), F(2, 5), 1, F(1, 4), 0)
    assert r.x2 in (1, -1) and 0 < r.value <= 1
    with pytest.raises(HypothesisFails):
        trivial_solve(0, 0, 0, HALF, 0, 0)


def test_residue_candidates_examples():
    assert set(residue_candidates(F(1, 6), HALF, 1)) == {(0, HALF), (F(1, 6), 0)}
    assert set(residue_candidates(F(1, 4), 1, 1)) == {(0, 0), (F(1, 4), HALF)}
    assert set(residue_candidates(F(1, 9), 1, 1)) == {(0, 0), (0, HALF), (F(1, 18), F(1, 4))}


def test_gstar_examples():
    g = gstar_transform(F(5, 17), HALF, F(1, 4), 0, 0, 0, F(1, 2))
    assert g.C == F(11, 34) and g.coefficient == F(5, 22)
    g = gstar_transform(F(2, 3), 0, F(1, 5), F(1, 7), F(1, 3), F(1, 4), F(1, 2))
    assert g.a4star == F(1, 3) and g.coefficient == F(2, 3) * F(1, 5) / F(1, 5)


@given(st.fractions(min_value=F(1, 10), max_value=3, max_denominator=30),
       st.fractions(min_value=0, max_value=F(1, 2), max_denominator=30))
def test_gstar_coefficient_is_t_when_a_equals_c(A, t):
    if t >= A:
        return
    import math
    lam2 = 1 - t / A
    num, den = lam2.numerator, lam2.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn != num or rd * rd != den:
        return
    g = gstar_transform(A, F(rn, rd), t, 0, 0, 0, 1)
    assert g.C == A and g.coefficient == t


@given(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=24), min_size=1, max_size=4))
def test_rational_gcd_generates(xs):
    g = rational_gcd(*xs)
    assert all(in_lattice(x, g) for x in xs)
    assert g >= 0


@settings(max_examples=200)
@given(st.integers(0, 2 ** 32))
def test_squeeze_property(seed):
    lc.check_squeeze(*lc.squeeze_case(random.Random(seed)))


@settings(max_examples=60)
@given(st.integers(0, 2 ** 32))
def test_jackson_property(seed):
    lc.check_jackson(*lc.jackson_case(random.Random(seed)))


@settings(max_examples=200)
@given(st.integers(0, 2 ** 32))
def test_macbeath_property(seed):
    lc.check_macbeath(lc.macbeath_case(random.Random(seed)))


@settings(max_examples=200)
@given(st.integers(0, 2 ** 32))
def test_trivial_property(seed):
    lc.check_trivial(*lc.trivial_case(random.Random(seed)))


@given(st.integers(1, 24), st.integers(-24, 24), st.integers(1, 24), st.integers(-48, 48), st.integers(1, 24))
def test_exceptional_pair_matches_brute_force(k, h2, _, bnum, bden):
    h = F(h2, 2)
    alpha = h / (k * k)
    if alpha <= 0 or k > 24 or alpha.denominator > 24 * 24:
        return
    beta = F(bnum, bden)
    p = MacbeathProblem(alpha, beta, abs(h - k * k * alpha) + 1, F(0), h, k)
    got = macbeath1_check(p) is MacbeathStatus.EXCEPTIONAL_PAIR
    assert got == lc.brute_exceptional(alpha, beta, h, k)
