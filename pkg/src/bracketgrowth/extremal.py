"""Extremal elements: certification, explicit matrix families, extremal bases
and the generic set U(B, b1)."""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import AlgebraSpec
from .kernel import IncrementalSpan, decode_many, matmul
from . import rootsystem


class ExtremalError(RuntimeError):
    pass


@dataclass
class ExtremalCertificate:
    element: np.ndarray
    extremal: bool
    lam: np.ndarray | None = None  # lambda_x(y) = lam . y
    refutation: int | None = None  # basis index i with [[b_i, x], x] not in Kx

    @property
    def sandwich(self) -> bool:
        return self.extremal and not self.lam.any()

    def value(self, ctx, y) -> int:
        return int(matmul(ctx, self.lam[None, :], np.asarray(y, dtype=np.int64)[:, None])[0, 0])

    def to_json(self) -> dict:
        return {
            "element": self.element.tolist(),
            "lambda": None if self.lam is None else self.lam.tolist(),
            "sandwich": bool(self.extremal and self.sandwich),
        }


def certify_extremal(g: AlgebraSpec, x) -> ExtremalCertificate:
    """Check [[b_i, x], x] ∈ Kx for every basis vector b_i and read off lambda."""
    ctx = g.ctx
    x = np.asarray(x, dtype=np.int64)
    nz = np.nonzero(x)[0]
    if nz.size == 0:
        raise ValueError("the zero element is not certified")
    R = g.right_matrix(x)
    Q = matmul(ctx, R, R)  # column i is [[b_i, x], x]
    p0 = int(nz[0])
    lam = ctx.mul(Q[p0], ctx.inv(int(x[p0])))
    expect = ctx.mul(x[:, None], lam[None, :])
    bad = np.nonzero((Q != expect).any(axis=0))[0]
    if bad.size:
        return ExtremalCertificate(x, False, None, int(bad[0]))
    return ExtremalCertificate(x, True, lam)


def extrbra_combine(g: AlgebraSpec, cx: ExtremalCertificate, cy: ExtremalCertificate) -> ExtremalCertificate:
    """x + [x, y] + (1/2) lambda_y(x) y, re-certified."""
    ctx = g.ctx
    if ctx.p == 2:
        raise ValueError("needs odd characteristic")
    if not (cx.extremal and cy.extremal):
        raise ValueError("both inputs must be certified extremal")
    x, y = cx.element, cy.element
    half = ctx.inv(2)
    coef = ctx.mul(half, cy.value(ctx, x))
    w = ctx.add(ctx.add(x, g.bracket(x, y)), ctx.mul(coef, y))
    if not w.any():
        raise ExtremalError("combination vanished")
    cert = certify_extremal(g, w)
    if not cert.extremal:
        raise ExtremalError(f"combination is not extremal (refuted by b{cert.refutation + 1})")
    return cert


def extremal_identity_check(g: AlgebraSpec, x, y, z: ExtremalCertificate) -> bool:
    """2[[x,z],[y,z]] = l(x)[y,z] - l(y)[x,z] + l([x,y]) z for a single pair."""
    return bool(extremal_identity_batch(g, np.asarray(x)[None, :], np.asarray(y)[None, :], z).all())


def extremal_identity_batch(g: AlgebraSpec, X, Y, z: ExtremalCertificate) -> np.ndarray:
    """Vectorised identity check; returns a boolean per row pair."""
    ctx = g.ctx
    X = np.asarray(X, dtype=np.int64).reshape(-1, g.dim)
    Y = np.asarray(Y, dtype=np.int64).reshape(-1, g.dim)
    Z = np.repeat(z.element[None, :], len(X), axis=0)
    xz = g.bracket_many(X, Z)
    yz = g.bracket_many(Y, Z)
    lhs = ctx.mul(2, g.bracket_many(xz, yz))
    lam = z.lam
    lx = matmul(ctx, X, lam[:, None])
    ly = matmul(ctx, Y, lam[:, None])
    lxy = matmul(ctx, g.bracket_many(X, Y), lam[:, None])
    rhs = ctx.sub(ctx.mul(lx, yz), ctx.mul(ly, xz))
    rhs = ctx.add(rhs, ctx.mul(lxy, Z))
    return (lhs == rhs).all(axis=1)


# explicit matrix families ---------------------------------------------------------


@dataclass
class FamilyMember:
    name: str
    matrix: np.ndarray
    formula: Callable[[np.ndarray], int]  # closed-form lambda as a function of z's matrix
    in_basis: bool


def _parse_label(g: AlgebraSpec) -> tuple[str, int]:
    m = re.fullmatch(r"(sl|so|sp)_(\d+)", g.label)
    if not m or g.realization is None:
        raise ValueError("needs an sl/so/sp algebra with its matrix realization")
    return m.group(1), int(m.group(2))


def _mat(N, *terms):
    """terms are (coef, i, j) with 1-based indices."""
    M = np.zeros((N, N), dtype=np.int64)
    for c, i, j in terms:
        M[i - 1, j - 1] += c
    return M


def _z(Z, i, j):
    return int(Z[i - 1, j - 1])


def family_members(g: AlgebraSpec) -> list[FamilyMember]:
    """The explicit extremal matrices with their closed-form lambda functionals.

    Indices are 1-based as in the usual e_ij notation.  ``in_basis`` marks
    the members forming the explicit extremal basis of each type."""
    kind, N = _parse_label(g)
    out: list[FamilyMember] = []
    add = lambda name, M, f, b: out.append(FamilyMember(name, M, f, b))
    if kind == "sl":
        n = N
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j:
                    add(f"e{i}{j}", _mat(N, (1, i, j)), lambda Z, i=i, j=j: -2 * _z(Z, j, i), True)
        for i in range(1, n):
            k = i + 1
            M = _mat(N, (1, i, i), (1, i, k), (-1, k, i), (-1, k, k))
            f = lambda Z, i=i, k=k: -2 * (_z(Z, i, i) + _z(Z, k, i) - _z(Z, i, k) - _z(Z, k, k))
            add(f"e{i}{i}+e{i}{k}-e{k}{i}-e{k}{k}", M, f, True)
        return out
    if kind == "sp":
        n = N // 2
        for i in range(1, n + 1):
            add(f"e{i},{i + n}", _mat(N, (1, i, i + n)), lambda Z, i=i: -2 * _z(Z, i + n, i), True)
        for i in range(1, n + 1):
            add(f"e{i + n},{i}", _mat(N, (1, i + n, i)), lambda Z, i=i: -2 * _z(Z, i, i + n), True)
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                M = _mat(N, (1, i, i + n), (1, i, j + n), (1, j, i + n), (1, j, j + n))
                f = lambda Z, i=i, j=j: -2 * (_z(Z, i + n, i) + _z(Z, j + n, i) + _z(Z, i + n, j) + _z(Z, j + n, j))
                add(f"e{i},{i + n}+e{i},{j + n}+e{j},{i + n}+e{j},{j + n}", M, f, True)
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                M = _mat(N, (1, i + n, i), (1, i + n, j), (1, j + n, i), (1, j + n, j))
                f = lambda Z, i=i, j=j: -2 * (_z(Z, i, i + n) + _z(Z, j, i + n) + _z(Z, i, j + n) + _z(Z, j, j + n))
                add(f"e{i + n},{i}+e{i + n},{j}+e{j + n},{i}+e{j + n},{j}", M, f, True)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                M = _mat(N, (1, i, j), (1, i, i + n), (-1, j + n, j), (-1, j + n, i + n))
                f = lambda Z, i=i, j=j: -2 * (_z(Z, j, i) + _z(Z, i + n, i) - _z(Z, j, j + n) - _z(Z, i + n, j + n))
                add(f"e{i},{j}+e{i},{i + n}-e{j + n},{j}-e{j + n},{i + n}", M, f, True)
        return out
    # orthogonal algebras, split realisation
    n = N // 2
    odd = N % 2 == 1
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                add(f"e{i},{j}-e{j + n},{i + n}", _mat(N, (1, i, j), (-1, j + n, i + n)),
                    lambda Z, i=i, j=j: -2 * _z(Z, j, i), True)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                add(f"e{i},{j + n}-e{j},{i + n}", _mat(N, (1, i, j + n), (-1, j, i + n)),
                    lambda Z, i=i, j=j: -2 * _z(Z, j + n, i), i < j)
                add(f"e{i + n},{j}-e{j + n},{i}", _mat(N, (1, i + n, j), (-1, j + n, i)),
                    lambda Z, i=i, j=j: -2 * _z(Z, j, i + n), i < j)

    def mixed(i, j):
        return _mat(N, (1, i, i), (-1, i + n, i + n), (1, j, j), (-1, j + n, j + n),
                    (1, i, j + n), (-1, j, i + n), (1, i + n, j), (-1, j + n, i))

    def mixed_f(i, j):
        return lambda Z: -2 * (_z(Z, i, i) + _z(Z, j, j) - _z(Z, i, j + n) - _z(Z, i + n, j))

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                chosen = (i == 1 and j > 1) or (i, j) == (2, 3)
                add(f"h{i}{j}", mixed(i, j), mixed_f(i, j), chosen)
    if odd:
        Z0 = N
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i == j:
                    continue
                M = _mat(N, (2, i, j), (-2, j + n, i + n), (1, j, i + n), (-1, i, j + n), (2, i, Z0), (-2, Z0, i + n))
                f = lambda Z, i=i, j=j: -2 * (2 * _z(Z, j, i) - _z(Z, j + n, i) - 2 * _z(Z, i + n, Z0))
                add(f"u{i}{j}", M, f, (j == 1 and i > 1) or (i, j) == (1, 2))
                M = _mat(N, (2, i, j), (-2, j + n, i + n), (1, j + n, i), (-1, i + n, j), (2, Z0, j), (-2, j + n, Z0))
                f = lambda Z, i=i, j=j: -2 * (2 * _z(Z, j, i) + _z(Z, i, j + n) + 2 * _z(Z, j, Z0))
                add(f"v{i}{j}", M, f, (i == 1 and j > 1) or (i, j) == (2, 1))
    return out


@dataclass
class FamilyCheck:
    name: str
    certificate: ExtremalCertificate
    formula_matches: bool


def appendix_extremal_families(g: AlgebraSpec, strict: bool = True) -> list[FamilyCheck]:
    """Certify every explicit family member and compare lambda with its closed form."""
    ctx = g.ctx
    out = []
    for m in family_members(g):
        v = g.from_matrix(np.asarray(m.matrix) % ctx.p)
        cert = certify_extremal(g, v)
        if not cert.extremal:
            if strict:
                raise ExtremalError(f"{m.name} is not extremal")
            out.append(FamilyCheck(m.name, cert, False))
            continue
        closed = np.array([m.formula(g.realization[k]) % ctx.p for k in range(g.dim)], dtype=np.int64)
        ok = bool(np.array_equal(closed, cert.lam))
        if strict and not ok:
            raise ExtremalError(f"closed-form lambda of {m.name} disagrees with the computed row")
        out.append(FamilyCheck(m.name, cert, ok))
    return out


# extremal bases --------------------------------------------------------------------


@dataclass
class ExtremalBasis:
    g: AlgebraSpec
    certificates: list[ExtremalCertificate]  # index 0 is b_1
    witness_a: list[np.ndarray]
    witness_b: list[np.ndarray | None]  # entry 0 unused
    source: list[str]
    b1_attempts: list[dict] = field(default_factory=list)

    @property
    def elements(self) -> np.ndarray:
        return np.array([c.element for c in self.certificates], dtype=np.int64)

    @property
    def lam_rows(self) -> np.ndarray:
        return np.array([c.lam for c in self.certificates], dtype=np.int64)

    def verify(self) -> bool:
        """Recheck every certificate and witness by direct evaluation."""
        g, ctx = self.g, self.g.ctx
        B = self.elements
        if IncrementalSpan_dim(ctx, B) != g.dim:
            return False
        for c in self.certificates:
            fresh = certify_extremal(g, c.element)
            if not fresh.extremal or not np.array_equal(fresh.lam, c.lam) or not c.lam.any():
                return False
        for c, z in zip(self.certificates, self.witness_a):
            if c.value(ctx, z) == 0:
                return False
        b1 = B[0]
        for b, z in zip(B[1:], self.witness_b[1:]):
            if not g.bracket(g.bracket(z, b1), g.bracket(z, b)).any():
                return False
        return True

    def jsonl(self) -> list[str]:
        lines = []
        for t, (c, za, zb) in enumerate(zip(self.certificates, self.witness_a, self.witness_b)):
            rec = c.to_json()
            rec["witness_a"] = za.tolist()
            rec["witness_b"] = None if zb is None else {"b1": 0, "z": zb.tolist()}
            rec["source"] = self.source[t]
            lines.append(json.dumps(rec, sort_keys=True))
        return lines


def IncrementalSpan_dim(ctx, rows) -> int:
    S = IncrementalSpan(ctx, np.asarray(rows).shape[1])
    for r in rows:
        S.add(r)
    return S.dim


def seed_pool(g: AlgebraSpec) -> list[tuple[str, ExtremalCertificate]]:
    """Certified, non-sandwich starting elements."""
    pool = []
    if g.realization is not None:
        members = family_members(g)
        members.sort(key=lambda m: not m.in_basis)  # the explicit basis first
        for m in members:
            cert = certify_extremal(g, g.from_matrix(np.asarray(m.matrix) % g.ctx.p))
            if cert.extremal and cert.lam.any():
                pool.append((m.name, cert))
        return pool
    kind = _chevalley_kind(g)
    if kind is None:
        raise ExtremalError("no seed pool for this algebra (not a classical build)")
    R = rootsystem.root_system(*kind)
    npos, r = len(R.positive), R.rank
    longest = max(R.norm(a) for a in R.positive)
    idx = []
    for t, a in enumerate(R.positive):
        if R.norm(a) == longest:
            idx += [t, npos + r + t]
    shorts = [t for t, a in enumerate(R.positive) if R.norm(a) != longest]
    idx += [u for t in shorts for u in (t, npos + r + t)]
    for t in sorted(set(idx), key=idx.index):
        e = np.zeros(g.dim, dtype=np.int64)
        e[t] = 1
        cert = certify_extremal(g, e)
        if cert.extremal and cert.lam.any():
            pool.append((g.name(t), cert))
    return pool


def _chevalley_kind(g: AlgebraSpec):
    m = re.fullmatch(r"([GFE])(\d)", g.label)
    return (m.group(1), int(m.group(2))) if m else None


def _extend_pool(g: AlgebraSpec, pool, span: IncrementalSpan, chosen: list, max_rounds: int = 4):
    """Enlarge the span with extremal-bracket combinations of pool elements."""
    ctx = g.ctx
    for _ in range(max_rounds):
        if span.dim == g.dim:
            return
        grown = False
        current = list(pool)
        for (nx, cx), (ny, cy) in itertools.product(current, repeat=2):
            if span.dim == g.dim:
                return
            if nx == ny:
                continue
            x, y = cx.element, cy.element
            coef = ctx.mul(ctx.inv(2), cy.value(ctx, x))
            w = ctx.add(ctx.add(x, g.bracket(x, y)), ctx.mul(coef, y))
            if not span.reduce(w).any():
                continue
            cert = extrbra_combine(g, cx, cy)
            if not cert.lam.any():
                continue
            span.add(cert.element)
            name = f"comb({nx},{ny})"
            chosen.append((name, cert))
            pool.append((name, cert))
            grown = True
        if not grown:
            break


def exp_ad(g: AlgebraSpec, e, x) -> np.ndarray:
    """exp(ad e)(x) = sum_k ad_e^k(x) / k!, for ad e nilpotent of index < p."""
    ctx = g.ctx
    L = g.left_matrix(e)
    term = np.asarray(x, dtype=np.int64)
    out = term.copy()
    fact = 1
    for k in range(1, ctx.p):
        term = matmul(ctx, L, term)
        if not term.any():
            return out
        fact = fact * k % ctx.p
        out = ctx.add(out, ctx.mul(ctx.inv(fact), term))
    if matmul(ctx, L, term).any():
        raise ExtremalError("ad e is not nilpotent of index below the characteristic")
    return out


def _conjugate_pool(g: AlgebraSpec, pool, span: IncrementalSpan, chosen: list):
    """Images of pool elements under exp(ad e_b) for Chevalley vectors e_b.

    Automorphisms preserve extremality; every image is still re-certified."""
    E = np.eye(g.dim, dtype=np.int64)
    for t in range(g.dim):
        if span.dim == g.dim:
            return
        if g.names and g.names[t].startswith("h"):
            continue
        for name, c in list(pool):
            try:
                w = exp_ad(g, E[t], c.element)
            except ExtremalError:
                break
            if not span.reduce(w).any():
                continue
            cert = certify_extremal(g, w)
            if not cert.extremal:
                raise ExtremalError("automorphic image failed certification")
            if not cert.lam.any():
                continue
            span.add(w)
            label = f"exp({g.name(t)})({name})"
            chosen.append((label, cert))
            pool.append((label, cert))
            if span.dim == g.dim:
                return


def _basis_from_pool(g: AlgebraSpec):
    pool = seed_pool(g)
    span = IncrementalSpan(g.ctx, g.dim)
    chosen = []
    for name, c in pool:
        if span.add(c.element):
            chosen.append((name, c))
    if span.dim < g.dim:
        _extend_pool(g, pool, span, chosen)
    if span.dim < g.dim:
        _conjugate_pool(g, pool, span, chosen)
    if span.dim < g.dim:
        raise ExtremalError(f"extremal elements found span only {span.dim} of {g.dim} dimensions")
    return chosen


def _pair_candidates(S: np.ndarray, ctx):
    """{s_i} then {s_i + s_j : i < j}, in this fixed order."""
    D = len(S)
    ii, jj = np.triu_indices(D, 1)
    return np.vstack([S, ctx.add(S[ii], S[jj])])


def _quad_witness(g: AlgebraSpec, Zc: np.ndarray, b1, b) -> np.ndarray | None:
    n = len(Zc)
    P = g.bracket_many(Zc, np.repeat(np.asarray(b1)[None, :], n, 0))
    Q = g.bracket_many(Zc, np.repeat(np.asarray(b)[None, :], n, 0))
    val = g.bracket_many(P, Q)
    hit = np.nonzero(val.any(axis=1))[0]
    return Zc[hit[0]] if hit.size else None


def build_extremal_basis(g: AlgebraSpec, max_b1: int | None = None) -> ExtremalBasis:
    """Certified extremal basis with non-sandwich witnesses (a) and the
    quadratic witnesses (b) for the first workable b_1 in basis order."""
    ctx = g.ctx
    chosen = _basis_from_pool(g)
    certs = [c for _, c in chosen]
    names = [n for n, _ in chosen]
    B = np.array([c.element for c in certs], dtype=np.int64)
    E = np.eye(g.dim, dtype=np.int64)
    wa = []
    for c in certs:
        k = int(np.nonzero(c.lam)[0][0])
        wa.append(E[k])
    Zc = _pair_candidates(B, ctx)
    attempts = []
    order = range(len(B)) if max_b1 is None else range(min(max_b1, len(B)))
    for t in order:
        wit: list[np.ndarray | None] = []
        failed = None
        for u in range(len(B)):
            if u == t:
                continue
            z = _quad_witness(g, Zc, B[t], B[u])
            if z is None:
                failed = u
                break
            wit.append(z)
        attempts.append({"b1": t, "ok": failed is None, "failed_b": failed})
        if failed is None:
            perm = [t] + [u for u in range(len(B)) if u != t]
            eb = ExtremalBasis(
                g,
                [certs[u] for u in perm],
                [wa[u] for u in perm],
                [None] + wit,
                [names[u] for u in perm],
                attempts,
            )
            return eb
    raise ExtremalError(f"no b_1 admits quadratic witnesses; attempts: {attempts}")


def b1_statistics(eb: ExtremalBasis) -> dict:
    """For every candidate b_1 in the built basis, whether all witnesses exist."""
    g, ctx = eb.g, eb.g.ctx
    B = eb.elements
    Zc = _pair_candidates(B, ctx)
    ok = 0
    fails = []
    for t in range(len(B)):
        if all(_quad_witness(g, Zc, B[t], B[u]) is not None for u in range(len(B)) if u != t):
            ok += 1
        else:
            fails.append(t)
    return {"candidates": len(B), "workable": ok, "failing": fails}


# generic set -------------------------------------------------------------------------


@dataclass
class GenericResult:
    in_U: bool
    excluded_by: str | None = None  # "V3" or "V'2" (1-based)


def is_generic(x, eb: ExtremalBasis) -> GenericResult:
    g, ctx = eb.g, eb.g.ctx
    x = np.asarray(x, dtype=np.int64)
    vals = matmul(ctx, eb.lam_rows, x[:, None])[:, 0]
    zero = np.nonzero(vals == 0)[0]
    if zero.size:
        return GenericResult(False, f"V{int(zero[0]) + 1}")
    B = eb.elements
    xb1 = g.bracket(x, B[0])
    n = len(B) - 1
    XB = g.bracket_many(np.repeat(x[None, :], n, 0), B[1:])
    v = g.bracket_many(np.repeat(xb1[None, :], n, 0), XB)
    zero = np.nonzero(~v.any(axis=1))[0]
    if zero.size:
        return GenericResult(False, f"V'{int(zero[0]) + 2}")
    return GenericResult(True)


def generic_many(X, eb: ExtremalBasis) -> np.ndarray:
    """Vectorised membership in U for the rows of X."""
    g, ctx = eb.g, eb.g.ctx
    X = np.asarray(X, dtype=np.int64).reshape(-1, g.dim)
    ok = (matmul(ctx, X, eb.lam_rows.T) != 0).all(axis=1)
    B = eb.elements
    n = len(X)
    xb1 = g.bracket_many(X, np.repeat(B[0][None, :], n, 0))
    for b in B[1:]:
        xb = g.bracket_many(X, np.repeat(b[None, :], n, 0))
        ok &= g.bracket_many(xb1, xb).any(axis=1)
    return ok


# quadratic escape ------------------------------------------------------------------------


@dataclass
class QuadEscape:
    status: str  # "verified", "vacuous", "failed"
    mode: str  # "exhaustive" or "sampled"
    detail: str = ""


def _lin(g, x, y):
    return lambda Z: g.bracket_many(g.bracket_many(Z, _rep(x, len(Z))), _rep(y, len(Z)))


def _quad(g, x, y):
    return lambda Z: g.bracket_many(g.bracket_many(Z, _rep(x, len(Z))), g.bracket_many(Z, _rep(y, len(Z))))


def _rep(v, n):
    return np.repeat(np.asarray(v, dtype=np.int64)[None, :], n, 0)


def quadresc_check(g: AlgebraSpec, x, y, z1=None, z2=None, which: str = "linear", limit: int = 200_000, seed: int = 0) -> QuadEscape:
    """Vanishing at a few points of a line (or on basis sums) forces vanishing
    on the whole plane (or space); the conclusion is checked by enumeration."""
    ctx = g.ctx
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    f = _lin(g, x, y) if which == "linear" else _quad(g, x, y)
    if which in ("linear", "quadratic"):
        z1 = np.asarray(z1, dtype=np.int64)
        z2 = np.asarray(z2, dtype=np.int64)
        ks = np.arange(ctx.q)
        line = ctx.add(z1[None, :], ctx.mul(ks[:, None], z2[None, :]))
        zeros = int((~f(line).any(axis=1)).sum())
        need = 2 if which == "linear" else 3
        if zeros < need:
            return QuadEscape("vacuous", "exhaustive", f"{zeros} vanishing points on the line")
        a, b = np.meshgrid(ks, ks, indexing="ij")
        plane = ctx.add(ctx.mul(a.reshape(-1, 1), z1[None, :]), ctx.mul(b.reshape(-1, 1), z2[None, :]))
        ok = not f(plane).any()
        return QuadEscape("verified" if ok else "failed", "exhaustive", f"{len(plane)} plane points")
    if which == "basis_total":
        E = np.eye(g.dim, dtype=np.int64)
        cands = _pair_candidates(E, ctx)
        if f(cands).any():
            return QuadEscape("vacuous", "exhaustive", "some basis sum is not a zero")
        total = ctx.q**g.dim
        if total <= limit:
            pts = decode_many(ctx, g.dim, np.arange(total)).reshape(-1, g.dim)
            mode = "exhaustive"
        else:
            pts = np.random.default_rng(seed).integers(0, ctx.q, size=(limit, g.dim))
            mode = "sampled"
        ok = not f(pts).any()
        return QuadEscape("verified" if ok else "failed", mode, f"{len(pts)} points")
    raise ValueError(f"unknown check {which}")
