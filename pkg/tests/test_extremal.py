import numpy as np
import pytest

from bracketgrowth.algebra import algebra_from_tensor, heisenberg
from bracketgrowth.extremal import (
    ExtremalError,
    appendix_extremal_families,
    build_extremal_basis,
    certify_extremal,
    extrbra_combine,
    extremal_identity_batch,
    extremal_identity_check,
    is_generic,
    quadresc_check,
)
from bracketgrowth.kernel import gf
from conftest import classical, extremal, vec
from oracles import Bracket, span_rank


def _lam_of_entry(g, cert, i, j, scale):
    """Compare cert.lam with z -> scale * z_ij on every basis element."""
    R = g.realization
    want = np.array([(scale * int(R[k][i][j])) % g.ctx.p for k in range(g.dim)])
    return np.array_equal(cert.lam, want)


def test_e12_in_sl2_is_extremal():
    g = classical("sl", 2, 7)
    c = certify_extremal(g, vec(g, e12=1))
    assert c.extremal and _lam_of_entry(g, c, 1, 0, -2)


def test_diagonal_is_refuted():
    g = classical("sl", 2, 7)
    h = vec(g, h1=1)
    c = certify_extremal(g, h)
    assert not c.extremal
    e = vec(g, e12=1)
    assert np.array_equal(g.bracket(g.bracket(e, h), h), vec(g, e12=4))


def test_heisenberg_centre_is_sandwich():
    g = heisenberg(gf(5))
    c = certify_extremal(g, np.array([0, 0, 1]))
    assert c.extremal and c.sandwich


def test_certificate_matches_definition():
    # [[b, x], x] = lam(b) x for every basis b, evaluated with the oracle bracket
    g = classical("sp", 2, 7)
    br = Bracket.of(g)
    for fc in appendix_extremal_families(g):
        x = tuple(int(v) for v in fc.certificate.element)
        for k in range(g.dim):
            b = tuple(int(i == k) for i in range(g.dim))
            lhs = br(br(b, x), x)
            assert lhs == tuple((int(fc.certificate.lam[k]) * c) % 7 for c in x)


def test_sl3_family_formula():
    g = classical("sl", 3, 7)
    fams = {f.name: f for f in appendix_extremal_families(g)}
    assert _lam_of_entry(g, fams["e12"].certificate, 1, 0, -2)
    assert all(f.formula_matches for f in fams.values())


def test_sp4_family():
    g = classical("sp", 2, 7)
    fams = {f.name: f for f in appendix_extremal_families(g)}
    assert fams["e1,3"].certificate.extremal


def test_so8_family_formula():
    g = classical("so_even", 4, 11)
    fams = {f.name: f for f in appendix_extremal_families(g)}
    assert _lam_of_entry(g, fams["e1,2-e6,5"].certificate, 1, 0, -2)
    assert all(f.formula_matches for f in fams.values())


def test_extrbra_combine_examples():
    g = classical("sl", 2, 7)
    cx, cy = certify_extremal(g, vec(g, e12=1)), certify_extremal(g, vec(g, e21=1))
    assert cy.value(g.ctx, cx.element) == 5  # -2 mod 7
    w = extrbra_combine(g, cx, cy)
    assert w.extremal and np.array_equal(w.element, vec(g, e12=1, h1=1, e21=-1))
    # x = y gives a multiple of x
    same = extrbra_combine(g, cx, cx)
    assert span_rank(7, [cx.element.tolist(), same.element.tolist()]) == 1
    # commuting pair with lambda_y(x) = 0 collapses to x
    g3 = classical("sl", 3, 7)
    a, b = certify_extremal(g3, vec(g3, e12=1)), certify_extremal(g3, vec(g3, e13=1))
    assert np.array_equal(extrbra_combine(g3, a, b).element, a.element)


def test_extrbra_rejects_non_extremal():
    g = classical("sl", 2, 7)
    with pytest.raises(ValueError):
        extrbra_combine(g, certify_extremal(g, vec(g, h1=1)), certify_extremal(g, vec(g, e12=1)))


def test_identity_trivial_cases():
    g = classical("sl", 2, 7)
    z = certify_extremal(g, vec(g, e12=1))
    x = vec(g, e21=3, h1=1)
    assert extremal_identity_check(g, x, x, z)
    h = heisenberg(gf(5))
    s = certify_extremal(h, np.array([0, 0, 1]))
    E = np.eye(3, dtype=np.int64)
    assert extremal_identity_batch(h, np.repeat(E, 3, 0), np.tile(E, (3, 1)), s).all()


def test_identity_oracle_on_sl3():
    g = classical("sl", 3, 7)
    br = Bracket.of(g)
    eb = extremal("sl", 3, 7)
    rng = np.random.default_rng(2)
    for c in eb.certificates:
        z = tuple(int(v) for v in c.element)
        lam = lambda v: sum(int(a) * b for a, b in zip(c.lam, v)) % 7
        for _ in range(20):
            x = tuple(int(v) for v in rng.integers(0, 7, size=g.dim))
            y = tuple(int(v) for v in rng.integers(0, 7, size=g.dim))
            lhs = tuple((2 * v) % 7 for v in br(br(x, z), br(y, z)))
            xz, yz = br(x, z), br(y, z)
            rhs = tuple((lam(x) * a - lam(y) * b + lam(br(x, y)) * w) % 7 for a, b, w in zip(yz, xz, z))
            assert lhs == rhs
            assert extremal_identity_check(g, np.array(x), np.array(y), c)


@pytest.mark.parametrize("kind,n,p", [("sl", 2, 7), ("sl", 3, 7), ("sp", 2, 7)])
def test_extremal_basis_properties(kind, n, p):
    g = classical(kind, n, p)
    eb = extremal(kind, n, p)
    assert eb.verify() and len(eb.certificates) == g.dim
    br = Bracket.of(g)
    B = [tuple(int(v) for v in b) for b in eb.elements]
    assert span_rank(p, B) == g.dim
    for c, za in zip(eb.certificates, eb.witness_a):
        assert c.value(g.ctx, za) != 0  # (a)
    for b, zb in zip(B[1:], eb.witness_b[1:]):
        zb = tuple(int(v) for v in zb)
        assert any(br(br(zb, B[0]), br(zb, b)))  # (b)


def test_heisenberg_has_no_extremal_basis():
    with pytest.raises(ExtremalError):
        build_extremal_basis(heisenberg(gf(5)))


def test_is_generic_examples():
    eb = extremal("sl", 2, 11)
    assert not is_generic(np.zeros(3, dtype=np.int64), eb).in_U
    r = is_generic(eb.elements[0], eb)
    assert not r.in_U and r.excluded_by == "V1"


def test_quadresc_examples():
    g = classical("sl", 2, 7)
    z = np.zeros(3, dtype=np.int64)
    assert quadresc_check(g, z, vec(g, e12=1), vec(g, e21=1), vec(g, h1=1)).status == "verified"
    ab = algebra_from_tensor(gf(7), 3, [], "abelian")
    assert quadresc_check(ab, np.array([1, 0, 0]), np.array([0, 1, 0]), which="basis_total").status == "verified"


def test_quadresc_seeded_linear_plane():
    g = classical("sl", 2, 7)
    rng = np.random.default_rng(0)
    found = 0
    for _ in range(400):
        x, y = rng.integers(0, 7, size=(2, 3))
        z1, z2 = rng.integers(0, 7, size=(2, 3))
        r = quadresc_check(g, x, y, z1, z2, "linear")
        assert r.status != "failed"
        found += r.status == "verified"
    assert found > 0
