import json

import numpy as np
import pytest

from bracketgrowth.algebra import (
    AlgebraSpec,
    BuildError,
    algebra_from_tensor,
    build_classical,
    centre,
    check_identity,
    expected_dimension,
    heisenberg,
    is_invariant,
    is_lie,
    is_simple,
    random_anticommutative,
    turrifiability_witness,
)
from bracketgrowth.growth import symmetric_closure
from bracketgrowth.kernel import gf
from conftest import classical, vec
from oracles import Bracket, anticommutative_violations, commutator, in_span, jacobi_violations, naive_anchored_S, naive_anchored_T


def test_sl2_brackets(sl2_5):
    g = sl2_5
    e, f, h = vec(g, e12=1), vec(g, e21=1), vec(g, h1=1)
    assert np.array_equal(g.bracket(e, f), h)
    assert np.array_equal(g.bracket(h, e), 2 * e % 5)


@pytest.mark.parametrize("omega", [2, 3, 4])
def test_scaled_pair_bracket(omega):
    g = classical("sl", 2, 7)
    b, c = vec(g, e12=omega), vec(g, e21=omega)
    assert np.array_equal(g.bracket(b, c), vec(g, h1=omega * omega))


@pytest.mark.parametrize("kind,n,p", [("sl", 2, 5), ("sl", 3, 7), ("sp", 2, 7), ("so_odd", 3, 5), ("so_even", 4, 5)])
def test_structure_tensor_matches_matrix_commutators(kind, n, p):
    g = classical(kind, n, p)
    R = g.realization.tolist()
    br = Bracket.of(g)
    E = np.eye(g.dim, dtype=np.int64)
    for i in range(g.dim):
        for j in range(g.dim):
            M = commutator(p, R[i], R[j])
            assert np.array_equal(g.from_matrix(M), np.array(br(tuple(E[i]), tuple(E[j]))))


def test_dense_and_sparse_forms_agree():
    g = classical("g2", None, 7)
    rng = np.random.default_rng(1)
    X = rng.integers(0, 7, size=(50, g.dim))
    Y = rng.integers(0, 7, size=(50, g.dim))
    br = Bracket.of(g)
    many = g.bracket_many(X, Y)
    outer = g.bracket_outer(X, Y)
    for n in range(50):
        want = br(tuple(X[n]), tuple(Y[n]))
        assert tuple(many[n]) == want
        assert tuple(outer[n, n]) == want


@pytest.mark.parametrize(
    "kind,n,dim", [("g2", None, 14), ("f4", None, 52), ("sl", 3, 8), ("sp", 2, 10), ("so_odd", 3, 21), ("so_even", 4, 28)]
)
def test_dimensions(kind, n, dim):
    assert classical(kind, n, 7).dim == dim
    assert expected_dimension(kind, n or 0) == dim


def test_e8_dimension():
    assert classical("e8", None, 13).dim == 248


def test_char_two_rejected():
    with pytest.raises(BuildError):
        build_classical("sl", 2, gf(2))


def test_identity_reports(sl2_5):
    rep = check_identity(sl2_5, "jacobi")
    assert rep.passed and rep.mode == "exhaustive" and rep.tuples_checked == 27
    assert check_identity(sl2_5, "malcev").passed
    # a single product b1 b2 = b1 and nothing else
    g = algebra_from_tensor(gf(5), 2, [(0, 1, 0, 1)], "toy")
    rep = check_identity(g, "anticommutative")
    assert not rep.passed and rep.counterexample == (0, 1)


def test_identity_agrees_with_oracle():
    for seed in range(6):
        g = random_anticommutative(gf(5), 4, seed, density=0.4)
        br = Bracket.of(g)
        basis = [tuple(r) for r in np.eye(4, dtype=int)]
        rep = check_identity(g, "jacobi")
        bad = jacobi_violations(br, basis)
        assert rep.passed == (not bad)
        if bad:
            first = min(tuple(int(np.argmax(v)) for v in t) for t in bad)
            assert rep.counterexample == first
        assert check_identity(g, "anticommutative").passed == (not anticommutative_violations(br, basis))


def test_associative_identity_on_matrices():
    from bracketgrowth.algebra import matrix_algebra

    assert check_identity(matrix_algebra(gf(5), 2), "associative").passed
    assert not check_identity(classical("sl", 2, 5), "associative").passed


def test_json_round_trip_bit_exact():
    for g in (classical("sl", 3, 7), classical("g2", None, 7), heisenberg(gf(5)), classical("sl", 2, 3, 2)):
        text = g.dumps()
        h = AlgebraSpec.from_json(json.loads(text))
        assert h.dumps() == text
        assert np.array_equal(h.dense, g.dense)


def test_simplicity():
    assert is_simple(classical("sl", 2, 5)).simple
    r = is_simple(classical("sl", 3, 3))
    assert not r.simple and r.witness.dim == 1
    assert r.witness == centre(classical("sl", 3, 3))
    g = classical("so_even", 2, 7, allow_small=True)
    r = is_simple(g)
    assert not r.simple and 0 < r.witness.dim < g.dim and is_invariant(g, r.witness)


def test_not_simple_flag():
    assert "not simple" in classical("sl", 3, 3).flags
    assert "not simple" not in classical("sl", 3, 7).flags


def test_turrifiability_k1_passes():
    g = random_anticommutative(gf(5), 4, 3)
    assert turrifiability_witness(g, np.array([1, 0, 0, 0]), symmetric_closure(g, np.eye(4, dtype=np.int64)[1:2]), 1).status == "pass"


def test_turrifiability_sl2_seeded():
    g = classical("sl", 2, 5)
    rng = np.random.default_rng(11)
    for _ in range(5):
        x = rng.integers(0, 5, size=3)
        Y = symmetric_closure(g, rng.integers(0, 5, size=(2, 3)))
        assert turrifiability_witness(g, x, Y, 4).status == "pass"


def test_turrifiability_matches_oracle_on_random_algebras():
    for seed in (42, 46, 3, 7):
        g = random_anticommutative(gf(5), 5, seed, density=0.2)
        br = Bracket.of(g)
        E = np.eye(5, dtype=np.int64)
        Y = symmetric_closure(g, E[1:3])
        r = turrifiability_witness(g, E[0], Y, 4)
        Yt = [tuple(int(c) for c in y) for y in Y]
        S = naive_anchored_S(br, (1, 0, 0, 0, 0), Yt, 4)
        T = naive_anchored_T(br, (1, 0, 0, 0, 0), Yt, 4)
        Tall = [v for m in T for v in T[m]]
        first = None
        for m in sorted(S):
            bad = sorted(v for v in S[m] if not in_span(5, Tall, v))
            if bad:
                first = (m, bad[0])
                break
        if first is None:
            assert r.status == "pass"
        else:
            assert r.status == "violation" and (r.level, tuple(r.violation)) == first


def test_random_witness_algebra_is_not_lie():
    g = random_anticommutative(gf(5), 5, 42, density=0.2)
    assert check_identity(g, "anticommutative").passed
    assert not is_lie(g)
