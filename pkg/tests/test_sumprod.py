import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bracketgrowth.kernel import gf
from bracketgrowth.sumprod import (
    FieldMismatch,
    ScalarSet,
    cauchy_davenport_check,
    cauchy_davenport_exhaustive,
    covering_check,
    covering_sweep,
    dichotomy_report,
    evaluate,
    growth_ratio,
    growth_ratio_stats,
    iterated_sum,
    setops,
    subfield_coset,
    subfield_coset_bruteforce,
    threshold_size,
)
from oracles import PolyField, PrimeField, cauchy_davenport_pairs, dfold, scalar_setop


def S(ctx, *xs):
    return ScalarSet.of(ctx, xs)


def test_setops_examples():
    F = gf(7)
    assert setops(S(F, 1, 2), S(F, 3, 4), "sum") == S(F, 4, 5, 6)
    assert setops(S(F, 1, 2), S(F, 1, 2), "product") == S(F, 1, 2, 4)
    assert setops(S(F, 0), S(F, 0), "product") == S(F, 0)
    with pytest.raises(FieldMismatch):
        setops(S(F, 1), S(gf(5), 1), "sum")


@pytest.mark.parametrize("q", [7, 9, 25])
def test_setops_match_oracle(q):
    F = gf(*{7: (7, 1), 9: (3, 2), 25: (5, 2)}[q])
    O = PrimeField(7) if q == 7 else PolyField(F.p, F.modulus)
    rng = np.random.default_rng(q)
    for _ in range(20):
        X = set(rng.choice(q, size=int(rng.integers(1, 6)), replace=False).tolist())
        Y = set(rng.choice(q, size=int(rng.integers(1, 6)), replace=False).tolist())
        for op in ("sum", "product", "difference"):
            assert set(setops(ScalarSet.of(F, X), ScalarSet.of(F, Y), op).elements.tolist()) == scalar_setop(O, X, Y, op)
        assert set(iterated_sum(ScalarSet.of(F, X), 3).elements.tolist()) == dfold(O, X, 3)


def test_evaluate_expressions():
    F = gf(11)
    X = S(F, 2, 3)
    XX = setops(X, X, "product")
    assert evaluate(X, "XX") == XX
    assert evaluate(X, "X+X") == setops(X, X, "sum")
    assert evaluate(X, "XX+XX+XX") == iterated_sum(XX, 3)
    assert evaluate(X, "3XX") == iterated_sum(XX, 3)


def test_growth_ratio_examples():
    F = gf(13)
    r = growth_ratio(ScalarSet.of(F, range(1, 13)))
    assert r.saturated and r.size == 13 and r.exponent is not None
    r = growth_ratio(S(F, 1))
    assert r.size == 1


def test_growth_ratio_stats_against_direct_count():
    rep = growth_ratio_stats(31, 5, 40, seed=3, expr="XX+XX+XX")
    rng = np.random.default_rng(3)
    O = PrimeField(31)
    sizes = []
    for _ in range(40):
        X = set(rng.choice(31, size=5, replace=False).tolist())
        sizes.append(len(dfold(O, scalar_setop(O, X, X, "product"), 3)))
    assert rep["sum"] == sum(sizes) and rep["min"] == min(sizes) and rep["max"] == max(sizes)


def test_covering_examples():
    F7 = gf(7)
    r = covering_check(S(F7, 1, 2, 3, 4), 3)
    assert r.covers and r.hypothesis_met
    r = covering_check(S(gf(7), 0), 2)
    assert not r.covers and r.flag == "hypothesis unmet" and not r.fault
    assert threshold_size(9, 2) == 6


def test_covering_gf9_exhaustive():
    rows = covering_sweep(9, 2)
    assert len(rows) == 84 and all(r["verdict"] == "covers" for r in rows)
    # oracle: every 6-subset X of GF(9) has XX+XX ⊇ GF(9)*
    F = gf(3, 2)
    O = PolyField(3, F.modulus)
    for X in itertools.combinations(range(9), 6):
        assert set(range(1, 9)) <= dfold(O, scalar_setop(O, X, X, "product"), 2)


@pytest.mark.parametrize("q,d", [(7, 3), (11, 2), (13, 3)])
def test_covering_sweeps_have_no_fault(q, d):
    rows = covering_sweep(q, d, instances=200, seed=1)
    assert rows and not any(r["verdict"] == "FAULT" for r in rows)


def test_covering_sweep_independent_of_workers():
    assert covering_sweep(13, 2, 150, seed=4) == covering_sweep(13, 2, 150, seed=4, workers=2)


def test_cauchy_davenport_examples():
    F5, F7 = gf(5), gf(7)
    r = cauchy_davenport_check(S(F5, 1, 2), S(F5, 3, 4))
    assert r.holds and r.sumset == 3 and r.bound == 3
    r = cauchy_davenport_check(ScalarSet.whole(F7), ScalarSet.whole(F7))
    assert r.sumset == 7 and r.bound == 7
    with pytest.raises(ValueError):
        cauchy_davenport_check(S(gf(3, 2), 1), S(gf(3, 2), 1))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_cauchy_davenport_exhaustive_matches_oracle(p):
    r = cauchy_davenport_exhaustive(p)
    pairs, bad = cauchy_davenport_pairs(p)
    assert r["pairs"] == pairs and r["violations"] == bad == 0


def test_subfield_examples():
    F9 = gf(3, 2)
    rep = dichotomy_report(S(F9, 0, 1, 2), "1/10")
    assert "is a subfield" in rep.flags and rep.sum_size == 3 and rep.product_size == 3
    rep = dichotomy_report(S(F9, 1, 3), "1/10")
    assert rep.below is None and rep.above == 3 and rep.size == 2 and not rep.cosets
    assert rep.sum_size == 3 and rep.product_size == 3
    rep = dichotomy_report(ScalarSet.whole(F9), "1/10")
    assert "saturated" in rep.flags


@settings(max_examples=40, deadline=None)
@given(st.sets(st.integers(0, 80), min_size=1, max_size=6), st.sampled_from([3, 9]))
def test_subfield_coset_agrees_with_bruteforce(xs, size):
    X = ScalarSet.of(gf(3, 4), xs)
    assert (subfield_coset(X, size) is None) == (subfield_coset_bruteforce(X, size) is None)
