import random
from fractions import Fraction

import pytest

from gamma14.cascade import Branch, NoWitnessInBox, classify, solve_instance
from gamma14.forms import GAMMA_32_3, GAMMA_8, ShiftedInstance, check_witness, form_determinant
from gamma14.oracle import SearchBox, brute_search
from gamma14.reduction import birch_instance, birch_reduce, case_params
from gamma14.sampling import random_instances, random_type14_form

from conftest import load_fixture

F = Fraction


def _label(inst):
    bf = birch_reduce(inst.form)
    return classify(case_params(bf, inst.gamma), birch_instance(inst, bf).shift, bf)


def test_classify_examples():
    assert _label(load_fixture("q1.json")).branch is Branch.C2_NON_INTEGRAL
    lab = _label(load_fixture("q2.json"))
    assert lab.branch is Branch.A_EQ_1 and lab.gamma_used == GAMMA_8


def test_classify_m1_k1_uses_32_3():
    from gamma14.forms import form_from_polynomial
    form = form_from_polynomial("x1*x2 - 9*x3**2/20 - x4**2/2 - 3*x5**2/5", 5)
    lab = _label(ShiftedInstance(form, (0,) * 5, GAMMA_8))
    assert lab.branch is Branch.MK and (lab.m, lab.K) == (1, 1)
    assert lab.gamma_used == GAMMA_32_3


def test_solve_q1_equality():
    w, trace = solve_instance(load_fixture("q1.json"))
    assert w.value == F(1, 2) and not w.strict
    assert trace.label.branch is Branch.C2_NON_INTEGRAL


def test_solve_q2_value_one():
    w, _ = solve_instance(load_fixture("q2.json"))
    assert w.value == 1


def test_trace_is_serializable():
    import json
    _, trace = solve_instance(load_fixture("q2.json"))
    json.dumps(trace.to_json())


def test_random_noninteger_c2_is_strict():
    rng = random.Random(8)
    done = 0
    for inst in random_instances(40, seed=17, gamma=GAMMA_8):
        c = list(inst.shift)
        c[1] = F(1, 3)
        inst = ShiftedInstance(inst.form, tuple(c), GAMMA_8)
        w, _ = solve_instance(inst)
        assert w.strict
        done += 1
    assert done == 40


@pytest.mark.parametrize("inst", list(random_instances(25, seed=99)))
def test_witness_revalidates_and_oracle_is_no_larger(inst):
    w, _ = solve_instance(inst)
    again = check_witness(inst, w.x)
    assert again.value == w.value
    res = brute_search(inst, SearchBox.cube(3, 5))
    if res.minimum is not None:
        assert res.minimum <= w.value or max(map(abs, w.x)) > 3


def test_invalid_instance_rejected():
    from gamma14.forms import FormError, QForm
    inst = ShiftedInstance(QForm([[F(1), F(0)], [F(0), F(-1)]]), (0, 0), GAMMA_8)
    with pytest.raises(FormError):
        solve_instance(inst)


def test_normal_shape_with_a_above_d_uses_direct_route():
    from gamma14.forms import QForm
    g = [["-4", "0", "2", "0", "-1/4"], ["0", "-3/4", "1", "-1/3", "-3"], ["2", "1", "-3", "-2", "-1"],
         ["0", "-1/3", "-2", "-4", "1"], ["-1/4", "-3", "-1", "1", "-2"]]
    form = QForm([[F(v) for v in row] for row in g])
    inst = ShiftedInstance(form, (F(1, 3), F(-2, 9), F(-3, 7), F(3, 11), F(0)), GAMMA_32_3)
    w, trace = solve_instance(inst)
    assert trace.params.m == 0 and trace.route == "direct"
    assert w.strict and check_witness(inst, w.x).value == w.value
