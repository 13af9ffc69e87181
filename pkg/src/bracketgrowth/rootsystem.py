"""Root systems and integer Chevalley bases.

Roots are integer coordinate tuples in the basis of simple roots.  The
structure constants N(a, b) are fixed by declaring N = +(p+1) on every
extraspecial pair and propagating through the standard relations among
the N's; everything is exact integer/rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.sparse as sp


def cartan_matrix(kind: str, rank: int) -> tuple[np.ndarray, list[int]]:
    """Cartan matrix A[i][j] = <alpha_i^vee, alpha_j> and squared root lengths."""
    kind = kind.upper()
    n = rank
    A = 2 * np.eye(n, dtype=np.int64)
    if kind in ("A", "B", "C", "D", "F", "G"):
        for i in range(n - 1):
            A[i, i + 1] = A[i + 1, i] = -1
    if kind == "A":
        lengths = [2] * n
    elif kind == "B":
        A[n - 1, n - 2] = -2  # alpha_n short
        lengths = [4] * (n - 1) + [2]
    elif kind == "C":
        A[n - 2, n - 1] = -2  # alpha_n long
        lengths = [2] * (n - 1) + [4]
    elif kind == "D":
        A[n - 2, n - 1] = A[n - 1, n - 2] = 0
        A[n - 3, n - 1] = A[n - 1, n - 3] = -1
        lengths = [2] * n
    elif kind == "G":
        if n != 2:
            raise ValueError("G has rank 2")
        A[0, 1] = -3  # alpha_1 short
        lengths = [2, 6]
    elif kind == "F":
        if n != 4:
            raise ValueError("F has rank 4")
        A[2, 1] = -2  # alpha_1, alpha_2 long; alpha_3, alpha_4 short
        lengths = [4, 4, 2, 2]
    elif kind == "E":
        if n not in (6, 7, 8):
            raise ValueError("E has rank 6, 7 or 8")
        # Bourbaki numbering: chain 1-3-4-5-6-7-8, node 2 attached to 4
        edges = [(0, 2), (2, 3), (3, 4), (1, 3)] + [(i, i + 1) for i in range(4, n - 1)]
        for a, b in edges:
            A[a, b] = A[b, a] = -1
        lengths = [2] * n
    else:
        raise ValueError(f"unknown type {kind}")
    return A, lengths


@dataclass
class RootSystemData:
    kind: str
    rank: int
    cartan: np.ndarray
    lengths: list[int]
    positive: list[tuple[int, ...]]
    form: np.ndarray
    extraspecial: dict
    N: dict  # (a, b) -> int for all roots a, b with a + b a root

    @property
    def roots(self) -> list[tuple[int, ...]]:
        return self.positive + [tuple(-c for c in r) for r in self.positive]

    def norm(self, r) -> int:
        v = np.asarray(r)
        return int(v @ self.form @ v)

    def pairing(self, beta, i: int) -> int:
        """<beta, alpha_i^vee>."""
        return int(np.dot(self.cartan[i], beta))


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _neg(a):
    return tuple(-x for x in a)


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def positive_roots(A: np.ndarray) -> list[tuple[int, ...]]:
    n = A.shape[0]
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    found = list(simple)
    known = set(found)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(n):
                p = 0
                cur = beta
                while True:
                    cur = _sub(cur, simple[i])
                    if cur in known:
                        p += 1
                    else:
                        break
                q = p - int(np.dot(A[i], beta))
                if q > 0:
                    gamma = _add(beta, simple[i])
                    if gamma not in known:
                        known.add(gamma)
                        nxt.append(gamma)
        nxt.sort(key=lambda r: (sum(r), [-c for c in r]))
        found.extend(nxt)
        layer = nxt
    return found


@lru_cache(maxsize=None)
def root_system(kind: str, rank: int) -> RootSystemData:
    A, lengths = cartan_matrix(kind, rank)
    pos = positive_roots(A)
    form = np.array([[A[i, j] * lengths[i] // 2 for j in range(rank)] for i in range(rank)], dtype=np.int64)
    if not (form == form.T).all():
        raise AssertionError("non-symmetrisable Cartan data")
    order = {r: t for t, r in enumerate(pos)}
    roots = set(pos) | {_neg(r) for r in pos}

    def norm(r):
        v = np.asarray(r)
        return int(v @ form @ v)

    def is_pos(r):
        return r in order

    def string_down(beta, alpha):
        p = 0
        cur = _sub(beta, alpha)
        while cur in roots:
            p += 1
            cur = _sub(cur, alpha)
        return p

    Npos: dict = {}
    extraspecial: dict = {}

    def N(a, b) -> int:
        s = _add(a, b)
        if s not in roots:
            return 0
        if is_pos(a) and is_pos(b):
            return Npos[(a, b)]
        if not is_pos(a) and not is_pos(b):
            return -N(_neg(a), _neg(b))
        x1, x2, x3 = a, b, _neg(s)
        if is_pos(x2) == is_pos(x3):
            val = Fraction(N(x2, x3) * norm(x3), norm(x1))
        else:
            val = Fraction(N(x3, x1) * norm(x3), norm(x2))
        if val.denominator != 1:
            raise AssertionError("non-integral structure constant")
        return int(val)

    for xi in pos:
        if sum(xi) < 2:
            continue
        pairs = [(a, _sub(xi, a)) for a in pos if _sub(xi, a) in order]
        g = min((a for a, _ in pairs), key=lambda a: order[a])
        d = _sub(xi, g)
        extraspecial[xi] = (g, d)
        val = string_down(d, g) + 1
        Npos[(g, d)] = val
        Npos[(d, g)] = -val
        for a, b in pairs:
            if (a, b) in Npos:
                continue
            if order[a] > order[b]:
                continue
            t2 = Fraction(0)
            th = _sub(d, a)
            if th in roots:
                t2 = Fraction(N(d, _neg(a)) * N(g, _neg(b)), norm(th))
            t3 = Fraction(0)
            th = _sub(g, a)
            if th in roots:
                t3 = Fraction(N(_neg(a), g) * N(d, _neg(b)), norm(th))
            # four-root relation on (g, d, -a, -b), then N(a,b) = -N(-a,-b)
            val = Fraction(norm(xi), Npos[(g, d)]) * (t2 + t3)
            if val.denominator != 1:
                raise AssertionError("non-integral structure constant")
            Npos[(a, b)] = int(val)
            Npos[(b, a)] = -int(val)

    allN = {}
    rl = sorted(roots)
    for a in rl:
        for b in rl:
            if _add(a, b) in roots:
                allN[(a, b)] = N(a, b)
    for (a, b), v in allN.items():
        expect = string_down(b, a) + 1
        if abs(v) != expect:
            raise AssertionError(f"|N{a},{b}| = {abs(v)} but expected {expect}")
    return RootSystemData(kind.upper(), rank, A, lengths, pos, form, extraspecial, allN)


EXCEPTIONAL = {"g2": ("G", 2), "f4": ("F", 4), "e6": ("E", 6), "e7": ("E", 7), "e8": ("E", 8)}


@lru_cache(maxsize=None)
def chevalley_tensor(kind: str, rank: int) -> tuple[np.ndarray, list[str]]:
    """Integer structure constants (i, j, k, c) of the Chevalley basis.

    Basis order: e_a for positive a, then h_1..h_r, then e_{-a}.
    """
    R = root_system(kind, rank)
    pos = R.positive
    npos = len(pos)
    r = rank
    index = {a: t for t, a in enumerate(pos)}
    index.update({_neg(a): npos + r + t for t, a in enumerate(pos)})
    names = [f"e{list(a)}" for a in pos] + [f"h{i + 1}" for i in range(r)] + [f"f{list(a)}" for a in pos]
    D = 2 * npos + r
    entries: dict[tuple[int, int, int], int] = {}

    def put(i, j, k, c):
        if c:
            entries[(i, j, k)] = entries.get((i, j, k), 0) + c

    roots = R.roots
    for a in roots:
        for b in roots:
            s = _add(a, b)
            if not any(s):
                # [e_a, e_-a] = h_a = sum_i m_i |alpha_i|^2 / |a|^2 h_i
                na = R.norm(a)
                for i in range(r):
                    c = Fraction(a[i] * R.lengths[i], na)
                    assert c.denominator == 1
                    put(index[a], index[b], npos + i, int(c))
            elif (a, b) in R.N:
                put(index[a], index[b], index[s], R.N[(a, b)])
    for i in range(r):
        for a in roots:
            c = R.pairing(a, i)
            put(npos + i, index[a], index[a], c)
            put(index[a], npos + i, index[a], -c)
    T = np.array([(i, j, k, c) for (i, j, k), c in sorted(entries.items()) if c], dtype=np.int64)
    assert D == len(names)
    return T, names


def integer_jacobi_violations(T: np.ndarray, D: int) -> int:
    """Count basis triples violating Jacobi over the integers (no reduction)."""
    L = [sp.lil_matrix((D, D), dtype=np.int64) for _ in range(D)]
    Rm = [sp.lil_matrix((D, D), dtype=np.int64) for _ in range(D)]
    rows: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for i, j, k, c in T.tolist():
        L[i][k, j] = c
        Rm[j][k, i] = c
        rows.setdefault((i, j), []).append((k, c))
    L = [m.tocsr() for m in L]
    Rm = [m.tocsr() for m in Rm]
    bad = 0
    for i in range(D):
        for j in range(D):
            J = Rm[i] @ L[j] + Rm[j] @ Rm[i]
            for k, c in rows.get((i, j), []):
                J = J + c * L[k]
            J.eliminate_zeros()
            bad += len(set(J.nonzero()[1]))
    return bad
