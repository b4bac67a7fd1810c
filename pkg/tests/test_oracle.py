import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gamma14.forms import QForm, ShiftedInstance, evaluate, to_matrix
from gamma14.oracle import (CRITICAL_FORMS, CaseSampler, CertificateFailure, RangeQuantity, SearchBox, TableError,
                            brute_search, bundled_case_tables, certify_critical, check_row, evaluate_expr,
                            evaluate_row, quantities, residue_sweep, verify_case_table, RowFalsified)
from gamma14.sampling import random_instances

from conftest import load_fixture

F = Fraction
HALF = F(1, 2)
TABLES = {t.id: t for t in bundled_case_tables()}


def test_brute_search_q1():
    res = brute_search(load_fixture("q1.json"), SearchBox.cube(6, 5), cap=100000)
    assert res.minimum == HALF
    assert (1, 0, 0, 0, 0) in res.witnesses


def test_brute_search_q2_box4():
    assert brute_search(load_fixture("q2.json"), SearchBox.cube(4, 5)).minimum == 1


def test_brute_search_binary_diagonal():
    inst = ShiftedInstance(QForm(to_matrix([[1, 0], [0, -1]])), (0, 0), 8)
    res = brute_search(inst, SearchBox.cube(3, 2))
    assert res.minimum == 1
    assert res.witnesses[0] in ((1, 0), (-1, 0))


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_brute_minimum_is_no_larger_than_any_value(seed):
    inst = next(random_instances(1, seed=seed))
    res = brute_search(inst, SearchBox.cube(2, 5))
    rng = random.Random(seed)
    for _ in range(50):
        x = [rng.randint(-2, 2) for _ in range(5)]
        v = evaluate(inst.form, [xi + c for xi, c in zip(x, inst.shift)])
        if v > 0:
            assert res.minimum is not None and res.minimum <= v
    if res.minimum is not None:
        for w in res.witnesses:
            assert evaluate(inst.form, [xi + c for xi, c in zip(w, inst.shift)]) == res.minimum


def test_certify_q1():
    cert = certify_critical("Q1")
    assert cert.modulus == 2
    assert cert.value == HALF == cert.d
    assert cert.sweep.least_positive >= HALF


@pytest.mark.parametrize("form_id", ["Q2", "Q3", "Q5", "Q6"])
def test_certify_other_forms(form_id):
    cert = certify_critical(form_id)
    assert cert.value == cert.d == 1


def test_q4_as_printed_has_a_smaller_value():
    inst = CRITICAL_FORMS["Q4"].instance()
    assert evaluate(inst.form, (0, 2, 1, 0, 0)) == HALF
    with pytest.raises(CertificateFailure):
        certify_critical("Q4")


def test_residue_sweep_lower_bound_is_sound():
    inst = load_fixture("q1.json")
    sweep = residue_sweep(inst, 2)
    res = brute_search(inst, SearchBox.cube(3, 5))
    assert sweep.least_positive <= res.minimum


@settings(max_examples=200)
@given(st.integers(-32, 32), st.integers(-31, 32))
def test_range_quantity_bounds(cn, an):
    c1, a2 = F(cn, 64), F(an, 64)
    if not (-HALF < c1 <= HALF and -HALF < a2 <= HALF):
        return
    q = quantities(c1, a2)
    for n in range(1, 5):
        assert q[f"f{n}"] >= q[f"g{n}"]
        assert q[f"f{n}"] == max(q[f"p{n}"], q[f"q{n}"])
        assert q[f"g{n}"] == min(q[f"p{n}"], q[f"q{n}"])
        assert q[f"f{n}"] <= n * HALF + n * n * HALF
        assert q[f"g{n}"] > -n * HALF - n * n * HALF
    assert -HALF < q["f1"] <= 1 and -1 < q["g1"] <= HALF
    assert RangeQuantity("f", 2, c1, a2).value == q["f2"]


def test_case_row_worked_example():
    table = TABLES["a_half_t3half_a5_half"]
    row = table.rows[0]
    env = CaseSampler(1).environment(table, {"c1": F(3, 10), "a2": F(1, 10)}, exact=True)
    assert env["f1"] == F(2, 5)
    value, claimed, bound = evaluate_row(table, row, env)
    assert value == claimed == F(3, 20)
    assert 0 < value < bound
    check_row(table, row, env, {})


def test_row_outside_range_is_not_sampled():
    table = TABLES["a_half_t3half_a5_half"]
    s = CaseSampler(2)
    env = s.environment(table, {"c1": F(0), "a2": F(-2, 5)}, exact=True)
    assert not s.matches(env, table.rows[0], True)


def test_falsified_row_is_reported():
    table = TABLES["a_half_t3half_a5_half"]
    rep = verify_case_table(table, CaseSampler(3), trials=100)
    assert {f.row.index for f in rep.falsified} == {5}
    with pytest.raises(RowFalsified):
        verify_case_table(table, CaseSampler(3), trials=100, raise_on_falsified=True)


def test_expression_evaluator_is_restricted():
    with pytest.raises(TableError):
        evaluate_expr("__import__('os')", {}, True)
    assert evaluate_expr("abs(-3/4) + 1 < 2", {}, True) is True


def test_sampler_is_deterministic():
    table = TABLES["m3K2L2_a5_zero"]
    a = verify_case_table(table, CaseSampler(5), trials=70).to_json()
    b = verify_case_table(table, CaseSampler(5), trials=70).to_json()
    assert a == b


def test_all_tables_validate():
    assert len(TABLES) == 18
    for t in TABLES.values():
        t.validate()
