import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bracketgrowth.growth import (
    GrowthSet,
    NotGenerating,
    bracket_layers,
    closure_size,
    diameter_lower_bound,
    fill_time,
    generates,
    grow_layers,
    olson_dichotomy,
    single_pair_family,
    span_escape,
    span_stabilization,
    symmetric_closure,
    tower_sets,
    two_pair_family,
)
from bracketgrowth.kernel import decode_many
from conftest import classical, vec
from oracles import Bracket, naive_bracket_powers, naive_closure, naive_fill, naive_layers, naive_towers, span_rank


def _as_set(arr):
    return frozenset(tuple(int(c) for c in r) for r in arr)


def _pair_set(g):
    return symmetric_closure(g, np.array([vec(g, e12=1), vec(g, e21=1)]))


def test_zero_set_stays_zero(sl2_5):
    A = GrowthSet.from_elements(sl2_5, np.zeros((1, 3), dtype=np.int64))
    grow_layers(A, 5)
    assert A.sizes() == [1] * 5


def test_two_pair_layer_two(sl2_5):
    A = GrowthSet.from_elements(sl2_5, _pair_set(sl2_5))
    grow_layers(A, 2)
    assert A.sizes() == [5, 15]
    oracle = naive_layers(Bracket.of(sl2_5), A.base.tolist(), 2)
    assert _as_set(A.layer(2)) == oracle[1]


def test_whole_algebra(sl2_5):
    allv = decode_many(sl2_5.ctx, 3, np.arange(125)).reshape(-1, 3)
    A = GrowthSet.from_elements(sl2_5, allv)
    grow_layers(A, 4)
    assert A.sizes() == [125] * 4
    assert fill_time(A).k == 1


def test_rejects_non_symmetric(sl2_5):
    with pytest.raises(ValueError):
        GrowthSet.from_elements(sl2_5, np.array([[1, 0, 0], [0, 0, 0]]))


@pytest.mark.parametrize("rep", ["bitset", "hash"])
def test_representations_agree_with_oracle(sl2_5, rep):
    rng = np.random.default_rng(5)
    br = Bracket.of(sl2_5)
    for _ in range(10):
        X = symmetric_closure(sl2_5, rng.integers(0, 5, size=(2, 3)))
        A = GrowthSet.from_elements(sl2_5, X, representation=rep)
        grow_layers(A, 4, short_circuit=False)
        assert [_as_set(L) for L in A.layers] == naive_layers(br, X.tolist(), 4)


def test_short_circuits_are_exact(sl2_5):
    rng = np.random.default_rng(9)
    for _ in range(10):
        X = symmetric_closure(sl2_5, rng.integers(0, 5, size=(int(rng.integers(1, 4)), 3)))
        fast = GrowthSet.from_elements(sl2_5, X)
        slow = GrowthSet.from_elements(sl2_5, X)
        grow_layers(fast, 6)
        grow_layers(slow, 6, short_circuit=False)
        assert [_as_set(L) for L in fast.layers] == [_as_set(L) for L in slow.layers]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)), min_size=0, max_size=3))
def test_layers_monotone_and_symmetric(gens):
    g = classical("sl", 2, 5)
    X = symmetric_closure(g, np.array(gens, dtype=np.int64).reshape(-1, 3))
    A = GrowthSet.from_elements(g, X)
    grow_layers(A, 4)
    sets = [_as_set(L) for L in A.layers]
    for a, b in zip(sets, sets[1:]):
        assert a <= b
    for s in sets:
        assert (0, 0, 0) in s and all(tuple((-c) % 5 for c in v) in s for v in s)


def test_budget_truncates(sl2_11):
    X = symmetric_closure(sl2_11, np.eye(3, dtype=np.int64))
    A = GrowthSet.from_elements(sl2_11, X)
    grow_layers(A, 6, max_elements=50)
    assert A.truncated and len(A.layers) < 6 and A.truncation_note


def test_bracket_layers(sl2_5):
    g = sl2_5
    e_only = GrowthSet.from_elements(g, symmetric_closure(g, vec(g, e12=1)[None, :]))
    assert _as_set(bracket_layers(e_only, 2).levels[2]) == {(0, 0, 0)}
    two = GrowthSet.from_elements(g, _pair_set(g))
    lv2 = _as_set(bracket_layers(two, 2).levels[2])
    assert {tuple(vec(g, h1=1)), tuple(vec(g, h1=-1))} <= lv2
    rng = np.random.default_rng(3)
    br = Bracket.of(g)
    for _ in range(5):
        X = symmetric_closure(g, rng.integers(0, 5, size=(2, 3)))
        r = bracket_layers(GrowthSet.from_elements(g, X), 4)
        assert r.eq1_holds
        P = naive_bracket_powers(br, [tuple(x) for x in X.tolist()], 4)
        for j in range(1, 5):
            assert _as_set(r.levels[j]) == frozenset(P[j])


def test_tower_sets(sl2_5):
    g = sl2_5
    X = _pair_set(g)
    T = tower_sets(g, X, None, 3, "towers")
    assert _as_set(T.levels[1]) == _as_set(X)
    assert {(0, 0, 0), tuple(vec(g, h1=1)), tuple(vec(g, h1=-1))} <= _as_set(T.levels[2])
    oracle = naive_towers(Bracket.of(g), [tuple(x) for x in X.tolist()], 3)
    assert _as_set(T.levels[3]) == frozenset(oracle[3])
    Y = symmetric_closure(g, vec(g, e21=1)[None, :])
    S = tower_sets(g, vec(g, e12=1)[None, :], Y, 2, "anchored_S")
    assert _as_set(S.levels[2]) == {(0, 0, 0), tuple(vec(g, h1=1)), tuple(vec(g, h1=-1))}


def test_olson_trivial_cases(sl2_5):
    z = GrowthSet.from_elements(sl2_5, np.zeros((1, 3), dtype=np.int64))
    assert olson_dichotomy(z, 1).horn == "closed"
    allv = decode_many(sl2_5.ctx, 3, np.arange(125)).reshape(-1, 3)
    assert olson_dichotomy(GrowthSet.from_elements(sl2_5, allv), 1).horn == "closed"


def test_closure_against_oracle(sl2_5):
    rng = np.random.default_rng(4)
    br = Bracket.of(sl2_5)
    for _ in range(8):
        X = symmetric_closure(sl2_5, rng.integers(0, 5, size=(int(rng.integers(1, 3)), 3)))
        assert closure_size(sl2_5, X) == len(naive_closure(br, [tuple(x) for x in X.tolist()]))


def test_span_stabilization(sl2_5):
    g = sl2_5
    allv = symmetric_closure(g, np.eye(3, dtype=np.int64))
    assert span_stabilization(GrowthSet.from_elements(g, allv)).k == 1
    e = span_stabilization(GrowthSet.from_elements(g, symmetric_closure(g, vec(g, e12=1)[None, :])))
    assert (e.k, e.dim) == (1, 1)
    assert span_stabilization(GrowthSet.from_elements(g, _pair_set(g))).dim == 3


def test_span_escape_examples(sl2_11):
    g = sl2_11
    A = GrowthSet.from_elements(g, _pair_set(g))
    assert span_escape(A, 1, "turrifiable").dim >= 1
    assert span_escape(A, 3, "turrifiable").dim == 3
    r = span_escape(A, 3, "anchored_turrifiable", v=vec(g, e12=1))
    assert r.dim == 3
    assert span_rank(11, r.witness.tolist()) == 3
    with pytest.raises(NotGenerating):
        span_escape(GrowthSet.from_elements(g, symmetric_closure(g, vec(g, e12=1)[None, :])), 2, "turrifiable")


def test_fill_time(sl2_5):
    z = GrowthSet.from_elements(sl2_5, np.zeros((1, 3), dtype=np.int64))
    assert fill_time(z).status == "not_generating"
    A = GrowthSet.from_elements(sl2_5, _pair_set(sl2_5))
    assert fill_time(A).k == naive_fill(Bracket.of(sl2_5), A.base.tolist())


def test_diameter_small_families(sl2_5):
    allv = decode_many(sl2_5.ctx, 3, np.arange(125)).reshape(-1, 3)
    assert diameter_lower_bound(sl2_5, [allv]).max_fill == 1
    r = diameter_lower_bound(sl2_5, single_pair_family(sl2_5))
    assert r.members == 62 and r.generating == 0 and r.max_fill is None


def test_two_pair_family_is_complete(sl2_5):
    fam = {_as_set(s) for s in two_pair_family(sl2_5)}
    # independent enumeration: all {0, ±x, ±y} with x, y nonzero and y not ±x
    nz = [v for v in itertools.product(range(5), repeat=3) if any(v)]
    want = set()
    for x, y in itertools.combinations(nz, 2):
        if y != tuple((-c) % 5 for c in x):
            want.add(frozenset({(0, 0, 0), x, y, tuple((-c) % 5 for c in x), tuple((-c) % 5 for c in y)}))
    assert fam == want and len(fam) == 1891


def test_diameter_independent_of_workers(sl2_5):
    fam = list(itertools.islice(two_pair_family(sl2_5), 120))
    a = diameter_lower_bound(sl2_5, fam, workers=1)
    b = diameter_lower_bound(sl2_5, fam, workers=3)
    assert (a.max_fill, a.histogram, a.generating) == (b.max_fill, b.histogram, b.generating)
    assert np.array_equal(a.argmax, b.argmax)


def test_generates(sl2_5):
    assert generates(sl2_5, _pair_set(sl2_5))
    assert not generates(sl2_5, symmetric_closure(sl2_5, vec(sl2_5, h1=1)[None, :]))
