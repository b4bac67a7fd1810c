import io
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gamma14.covers import (Condition, CoverageStuck, CoverEntry, CoverError, ChainError, Remark, RemarkKind, Scenario,
                            Status, bundled_table, covers_interval, generate_cover, load_scenarios, read_table,
                            verify_entry, verify_table, write_table)

F = Fraction
SCEN = load_scenarios()


def toy(lo, hi, bound, strict=True, cond=Condition.LEMMA5):
    return Scenario("toy", "t", F(lo), F(hi), bound, cond, strict)


def test_table_one_first_row_certified():
    sc = SCEN["m1K1_lemma5"]
    r = verify_entry(CoverEntry(1, F(4), 3, F("0.42692")), sc.hi, sc)
    assert r.status is Status.CERTIFIED


def test_toy_entry_certified():
    r = verify_entry(CoverEntry(1, F(1, 2), 1, F("0.4")), F("0.6"), toy("0.4", "0.6", "1"))
    assert r.status is Status.CERTIFIED


def test_toy_entry_counterexample_at_top():
    r = verify_entry(CoverEntry(1, F(1, 2), 1, F("0.9")), F(1), toy("0.9", "1", "1"))
    assert r.status is Status.COUNTEREXAMPLE
    assert r.witness == 1


def test_m2k3l4_table():
    sc = SCEN["m2K3L4"]
    rep = verify_table(bundled_table("m2K3L4.csv"), sc, tolerate_chain_defects=True)
    s = rep.summary()
    assert s["rows"] == 53 and s["counterexample"] == 0
    assert s["certified"] + s["superseded"] + s["boundary"] == 53
    assert s["chain_defects"] == [14]
    assert s["union_covers"] and s["covers_bottom"]
    assert set(s["printed_tbd"]) - set(s["tbd"]) == {10}


def test_chain_defect_is_structural_error_by_default():
    with pytest.raises(ChainError):
        verify_table(bundled_table("m2K3L4.csv"), SCEN["m2K3L4"])


def test_single_entry_table():
    sc = toy("0.4", "0.6", "1")
    rep = verify_table([CoverEntry(1, F(1, 2), 1, F("0.4"))], sc)
    assert rep.count("Certified") == 1 and rep.union_covers


def test_empty_table_rejected():
    with pytest.raises(CoverError):
        read_table(io.StringIO("n,h,k,lambda,remark\n"))
    with pytest.raises(CoverError):
        verify_table([], toy("0.4", "0.6", "1"))


def test_generate_constant_bound_single_entry():
    sc = toy("0.4", "0.6", "2", strict=False)
    rows = generate_cover(sc, k_max=4)
    assert len(rows) == 1 and (rows[0].h, rows[0].k) == (F(1, 2), 1)


def test_generate_bound_too_small_is_stuck():
    with pytest.raises(CoverageStuck):
        generate_cover(toy("0.4", "0.6", "1/4"), k_max=10)


def test_generate_m2k3l4_within_budget():
    sc = SCEN["m2K3L4"]
    rows = generate_cover(sc)
    assert len(rows) <= 80
    rep = verify_table(rows, sc)
    assert rep.count("Certified") == len(rows)


def test_csv_round_trip():
    rows = bundled_table("m3K1_a.csv")
    buf = io.StringIO()
    write_table(rows, buf)
    buf.seek(0)
    assert read_table(buf) == rows


def test_remark_parsing():
    assert Remark.parse("tbd").kind is RemarkKind.TBD
    r = Remark.parse("(7,4)")
    assert r.kind is RemarkKind.ALT and r.alt == (F(7), 4)
    with pytest.raises(CoverError):
        Remark.parse("(x)")


@given(st.lists(st.tuples(st.fractions(0, 1, max_denominator=20), st.fractions(0, 1, max_denominator=20)),
                max_size=8))
def test_covers_interval_matches_grid(pieces):
    pieces = [tuple(sorted(p)) for p in pieces]
    got = covers_interval(pieces, F(1, 4), F(3, 4))
    grid = [F(1, 4) + F(i, 2 * 20 * 20) for i in range(0, 401)]
    by_grid = all(any(a <= x <= b for a, b in pieces) for x in grid)
    if got:
        assert by_grid


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6))
def test_certified_rows_hold_at_random_points(seed):
    """Soundness spot-check: a certified row satisfies the pair condition at sampled points."""
    sc = SCEN["m1K1_lemma5"]
    rows = bundled_table("m1K1_lemma5.csv")
    rng = random.Random(seed)
    i = rng.randrange(len(rows))
    upto = sc.hi if i == 0 else rows[i - 1].lam
    e = rows[i]
    if verify_entry(e, upto, sc).status is not Status.CERTIFIED:
        return
    lo, hi = sorted((e.lam, upto))
    for _ in range(5):
        t = lo + (hi - lo) * F(rng.randint(0, 10 ** 6), 10 ** 6)
        assert sc.holds(e.h, e.k, t)
