"""Algebras given by structure constants, classical constructions, identity
checks and the simplicity test."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .kernel import (
    FieldCtx,
    IncrementalSpan,
    Subspace,
    annihilator,
    echelon_span,
    gf,
    matmul,
    nullspace,
    rank,
    rref,
)
from . import rootsystem

EXHAUSTIVE_LIMIT = 10**7


class BuildError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    """[b_i, b_j] = sum_k c b_k for every row (i, j, k, c) of ``tensor``."""

    ctx: FieldCtx
    dim: int
    tensor: np.ndarray
    label: str = ""
    realization: np.ndarray | None = None  # (D, N, N) basis matrices
    flags: tuple[str, ...] = ()
    names: tuple[str, ...] | None = None

    # compiled forms ------------------------------------------------------
    @cached_property
    def _ijkc(self):
        T = np.asarray(self.tensor, dtype=np.int64).reshape(-1, 4)
        return T[:, 0], T[:, 1], T[:, 2], T[:, 3]

    @cached_property
    def _scatter(self):
        I, J, K, C = self._ijkc
        return sp.csr_matrix((np.ones(len(K), dtype=np.int64), (np.arange(len(K)), K)), shape=(len(K), self.dim))

    @cached_property
    def pair_rows(self) -> dict[tuple[int, int], np.ndarray]:
        """Dense row of [b_i, b_j] for every pair with a nonzero bracket."""
        out: dict[tuple[int, int], np.ndarray] = {}
        I, J, K, C = self._ijkc
        for i, j, k, c in zip(I.tolist(), J.tolist(), K.tolist(), C.tolist()):
            row = out.setdefault((i, j), np.zeros(self.dim, dtype=np.int64))
            row[k] = self.ctx.add(row[k], c)
        return out

    @cached_property
    def dense(self) -> np.ndarray:
        """(D, D, D) table T[i, j] = [b_i, b_j]."""
        T = np.zeros((self.dim, self.dim, self.dim), dtype=np.int64)
        for (i, j), row in self.pair_rows.items():
            T[i, j] = row
        return T

    @cached_property
    def left_sparse(self) -> list[sp.csr_matrix]:
        """L_i with [b_i, y] = L_i y (column convention)."""
        return self._op_mats(left=True)

    @cached_property
    def right_sparse(self) -> list[sp.csr_matrix]:
        """R_j with [y, b_j] = R_j y."""
        return self._op_mats(left=False)

    def _op_mats(self, left: bool):
        D = self.dim
        buckets: list[list] = [[] for _ in range(D)]
        for (i, j), row in self.pair_rows.items():
            ks = np.nonzero(row)[0]
            for k in ks:
                if left:
                    buckets[i].append((k, j, row[k]))
                else:
                    buckets[j].append((k, i, row[k]))
        mats = []
        for b in buckets:
            if b:
                r, c, v = zip(*b)
                mats.append(sp.csr_matrix((np.array(v, dtype=np.int64), (r, c)), shape=(D, D)))
            else:
                mats.append(sp.csr_matrix((D, D), dtype=np.int64))
        return mats

    # brackets -------------------------------------------------------------
    def bracket(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if x.shape != (self.dim,) or y.shape != (self.dim,):
            raise ValueError("dimension mismatch")
        return self.bracket_many(x[None, :], y[None, :])[0]

    def bracket_many(self, X, Y) -> np.ndarray:
        """Row-wise brackets of two (n, D) arrays."""
        X = np.asarray(X, dtype=np.int64).reshape(-1, self.dim)
        Y = np.asarray(Y, dtype=np.int64).reshape(-1, self.dim)
        n = X.shape[0]
        I, J, K, C = self._ijkc
        ctx = self.ctx
        if len(I) == 0:
            return np.zeros((n, self.dim), dtype=np.int64)
        if ctx.k == 1:
            p = ctx.p
            out = np.empty((n, self.dim), dtype=np.int64)
            chunk = max(1, 2_000_000 // len(I))
            for s in range(0, n, chunk):
                prod = (X[s : s + chunk][:, I] * Y[s : s + chunk][:, J]) % p * C % p
                out[s : s + chunk] = np.asarray(self._scatter.T @ prod.T).T % p
            return out
        out = np.zeros((n, self.dim), dtype=np.int64)
        for i, j, k, c in zip(I.tolist(), J.tolist(), K.tolist(), C.tolist()):
            term = ctx.mul(ctx.mul(X[:, i], Y[:, j]), c)
            out[:, k] = ctx.add(out[:, k], term)
        return out

    def bracket_outer(self, X, Y) -> np.ndarray:
        """All brackets [x, y] for x in X, y in Y as an (|X|, |Y|, D) array."""
        X = np.asarray(X, dtype=np.int64).reshape(-1, self.dim)
        Y = np.asarray(Y, dtype=np.int64).reshape(-1, self.dim)
        ctx = self.ctx
        if ctx.k == 1 and self.dim <= 64:
            p = ctx.p
            T = self.dense
            out = np.empty((len(X), len(Y), self.dim), dtype=np.int64)
            chunk = max(1, 4_000_000 // max(1, len(Y) * self.dim))
            for s in range(0, len(X), chunk):
                Lx = np.einsum("ni,ijk->njk", X[s : s + chunk], T) % p
                out[s : s + chunk] = np.einsum("mj,njk->nmk", Y, Lx) % p
            return out
        Xr = np.repeat(X, len(Y), axis=0)
        Yr = np.tile(Y, (len(X), 1))
        return self.bracket_many(Xr, Yr).reshape(len(X), len(Y), self.dim)

    def left_matrix(self, x) -> np.ndarray:
        """Matrix of y -> [x, y]."""
        return self.bracket_many(np.repeat(np.asarray(x)[None, :], self.dim, 0), np.eye(self.dim, dtype=np.int64)).T

    def right_matrix(self, x) -> np.ndarray:
        """Matrix of y -> [y, x]."""
        return self.bracket_many(np.eye(self.dim, dtype=np.int64), np.repeat(np.asarray(x)[None, :], self.dim, 0)).T

    def basis(self) -> np.ndarray:
        return np.eye(self.dim, dtype=np.int64)

    def zero(self) -> np.ndarray:
        return np.zeros(self.dim, dtype=np.int64)

    def scale(self, c: int, x) -> np.ndarray:
        return self.ctx.mul(int(c), np.asarray(x, dtype=np.int64))

    def name(self, i: int) -> str:
        return self.names[i] if self.names else f"b{i + 1}"

    # matrix realisation ---------------------------------------------------
    @cached_property
    def _coord_solver(self):
        if self.realization is None:
            raise ValueError("no matrix realization attached")
        ctx = self.ctx
        flat = self.realization.reshape(self.dim, -1)
        R, piv = rref(ctx, flat)
        if len(piv) != self.dim:
            raise BuildError("realization matrices are dependent")
        # c @ flat = m is determined by the pivot columns
        inv = _inverse(ctx, flat[:, piv])
        return piv, inv, flat

    def from_matrix(self, M) -> np.ndarray:
        ctx = self.ctx
        piv, inv, flat = self._coord_solver
        m = np.asarray(M, dtype=np.int64).reshape(-1)
        c = matmul(ctx, m[piv][None, :], inv)[0]
        if not np.array_equal(matmul(ctx, c[None, :], flat)[0], m % ctx.p if ctx.k == 1 else m):
            raise ValueError("matrix is not in the algebra")
        return c

    def to_matrix(self, v) -> np.ndarray:
        N = self.realization.shape[1]
        return matmul(self.ctx, np.asarray(v, dtype=np.int64)[None, :], self.realization.reshape(self.dim, -1))[0].reshape(N, N)

    # serialisation ----------------------------------------------------------
    def to_json(self) -> dict:
        obj = {
            "label": self.label,
            "field": self.ctx.to_json(),
            "dim": self.dim,
            "tensor": np.asarray(self.tensor).tolist(),
        }
        if self.realization is not None:
            obj["realization"] = np.asarray(self.realization).tolist()
        if self.flags:
            obj["flags"] = list(self.flags)
        if self.names:
            obj["names"] = list(self.names)
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "AlgebraSpec":
        ctx = FieldCtx.from_json(obj["field"])
        D = int(obj["dim"])
        T = np.array(obj["tensor"], dtype=np.int64).reshape(-1, 4)
        if len(T) and (T[:, :3].min() < 0 or T[:, :3].max() >= D or T[:, 3].max() >= ctx.q):
            raise ValueError("tensor entry out of range")
        real = obj.get("realization")
        return cls(
            ctx,
            D,
            T,
            obj.get("label", ""),
            None if real is None else np.array(real, dtype=np.int64),
            tuple(obj.get("flags", ())),
            tuple(obj["names"]) if obj.get("names") else None,
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def _inverse(ctx: FieldCtx, M) -> np.ndarray:
    n = M.shape[0]
    R, piv = rref(ctx, np.hstack([M, np.eye(n, dtype=np.int64)]))
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return R[:, n:]


def tensor_from_products(ctx: FieldCtx, table: dict[tuple[int, int], Sequence[int]]) -> np.ndarray:
    rows = []
    for (i, j), vec in sorted(table.items()):
        for k, c in enumerate(vec):
            if c % ctx.q if ctx.k == 1 else c:
                rows.append((i, j, k, int(c)))
    return np.array(rows, dtype=np.int64).reshape(-1, 4)


def algebra_from_tensor(ctx: FieldCtx, dim: int, entries, label: str = "", **kw) -> AlgebraSpec:
    """Entries are (i, j, k, c) with integer c reduced into the prime field."""
    acc: dict[tuple[int, int, int], int] = {}
    for i, j, k, c in entries:
        key = (int(i), int(j), int(k))
        acc[key] = int(ctx.add(acc.get(key, 0), ctx.from_int(c)))
    T = np.array([(i, j, k, c) for (i, j, k), c in sorted(acc.items()) if c], dtype=np.int64).reshape(-1, 4)
    return AlgebraSpec(ctx, dim, T, label, **kw)


# matrix realisations -------------------------------------------------------


def _E(N: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((N, N), dtype=np.int64)
    m[i, j] = 1
    return m


def sl_basis(n: int):
    mats, names = [], []
    for i in range(n):
        for j in range(n):
            if i != j:
                mats.append(_E(n, i, j))
                names.append(f"e{i + 1}{j + 1}")
    for i in range(n - 1):
        mats.append(_E(n, i, i) - _E(n, i + 1, i + 1))
        names.append(f"h{i + 1}")
    return mats, names


def so_split_basis(N: int):
    """Basis of {x : x^T J + J x = 0}, J = [[0, I, 0], [I, 0, 0], [0, 0, 1]]."""
    n = N // 2
    mats, names = [], []
    for i in range(n):
        for j in range(n):
            mats.append(_E(N, i, j) - _E(N, j + n, i + n))
            names.append(f"e{i + 1},{j + 1}-e{j + n + 1},{i + n + 1}")
    for i in range(n):
        for j in range(i + 1, n):
            mats.append(_E(N, i, j + n) - _E(N, j, i + n))
            names.append(f"e{i + 1},{j + n + 1}-e{j + 1},{i + n + 1}")
    for i in range(n):
        for j in range(i + 1, n):
            mats.append(_E(N, i + n, j) - _E(N, j + n, i))
            names.append(f"e{i + n + 1},{j + 1}-e{j + n + 1},{i + 1}")
    if N % 2:
        z = N - 1
        for i in range(n):
            mats.append(_E(N, i, z) - _E(N, z, i + n))
            names.append(f"e{i + 1},{N}-e{N},{i + n + 1}")
        for i in range(n):
            mats.append(_E(N, i + n, z) - _E(N, z, i))
            names.append(f"e{i + n + 1},{N}-e{N},{i + 1}")
    return mats, names


def so_split_form(N: int) -> np.ndarray:
    n = N // 2
    J = np.zeros((N, N), dtype=np.int64)
    for i in range(n):
        J[i, i + n] = J[i + n, i] = 1
    if N % 2:
        J[N - 1, N - 1] = 1
    return J


def so_antisym_basis(N: int):
    mats, names = [], []
    for i in range(N):
        for j in range(i + 1, N):
            mats.append(_E(N, i, j) - _E(N, j, i))
            names.append(f"e{i + 1}{j + 1}-e{j + 1}{i + 1}")
    return mats, names


def sp_basis(n: int):
    N = 2 * n
    mats, names = [], []
    for i in range(n):
        for j in range(n):
            mats.append(_E(N, i, j) - _E(N, j + n, i + n))
            names.append(f"e{i + 1},{j + 1}-e{j + n + 1},{i + n + 1}")
    for i in range(n):
        for j in range(i, n):
            m = _E(N, i, j + n) + (_E(N, j, i + n) if j != i else 0)
            mats.append(m)
            names.append(f"e{i + 1},{j + n + 1}" + (f"+e{j + 1},{i + n + 1}" if j != i else ""))
    for i in range(n):
        for j in range(i, n):
            m = _E(N, i + n, j) + (_E(N, j + n, i) if j != i else 0)
            mats.append(m)
            names.append(f"e{i + n + 1},{j + 1}" + (f"+e{j + n + 1},{i + 1}" if j != i else ""))
    return mats, names


def algebra_from_matrices(ctx: FieldCtx, mats, label: str, names=None, flags=()) -> AlgebraSpec:
    """Structure constants of the commutator bracket on span(mats)."""
    B = np.array(mats, dtype=np.int64) % ctx.p
    D, N, _ = B.shape
    probe = AlgebraSpec(ctx, D, np.zeros((0, 4), dtype=np.int64), label, B)
    entries = []
    for i in range(D):
        for j in range(D):
            C = ctx.sub(matmul(ctx, B[i], B[j]), matmul(ctx, B[j], B[i]))
            if C.any():
                for k, c in enumerate(probe.from_matrix(C)):
                    if c:
                        entries.append((i, j, k, int(c)))
    T = np.array(entries, dtype=np.int64).reshape(-1, 4)
    return AlgebraSpec(ctx, D, T, label, B, tuple(flags), tuple(names) if names else None)


CLASSICAL_TYPES = ("sl", "so_odd", "so_even", "sp", "g2", "f4", "e6", "e7", "e8")


def expected_dimension(kind: str, n: int = 0) -> int:
    return {
        "sl": n * n - 1,
        "so_odd": n * (2 * n + 1),
        "so_even": n * (2 * n - 1),
        "sp": n * (2 * n + 1),
        "g2": 14,
        "f4": 52,
        "e6": 78,
        "e7": 133,
        "e8": 248,
    }[kind]


def build_classical(
    kind: str,
    n: int | None,
    ctx: FieldCtx,
    realization: str = "split",
    allow_small: bool = False,
    verify: bool = True,
) -> AlgebraSpec:
    """sl_n, so_{2n+1}, so_{2n}, sp_{2n} as matrices; g2..e8 from Chevalley bases.

    ``realization`` selects the orthogonal form: "split" (x^T J = -J x, the
    form in which the orthogonal extremal families are written) or
    "antisymmetric" (x^T = -x).
    """
    if kind not in CLASSICAL_TYPES:
        raise BuildError(f"unknown type {kind}")
    if ctx.p == 2:
        raise BuildError("characteristic 2 is not supported")
    flags: list[str] = []
    minimum = {"sl": 2, "so_odd": 3, "sp": 2, "so_even": 4}
    if kind in minimum:
        if n is None or n < 1:
            raise BuildError("rank parameter required")
        if n < minimum[kind] and not allow_small:
            raise BuildError(f"{kind} needs n >= {minimum[kind]}")
        if n < minimum[kind]:
            flags.append("below classical rank range")
    if kind == "sl":
        mats, names = sl_basis(n)
        if n % ctx.p == 0:
            flags.append("not simple")
        g = algebra_from_matrices(ctx, mats, f"sl_{n}", names, flags)
    elif kind in ("so_odd", "so_even"):
        N = 2 * n + 1 if kind == "so_odd" else 2 * n
        if realization == "split":
            mats, names = so_split_basis(N)
        elif realization == "antisymmetric":
            mats, names = so_antisym_basis(N)
        else:
            raise BuildError(f"unknown realization {realization}")
        if N == 4:
            flags.append("not simple")
        g = algebra_from_matrices(ctx, mats, f"so_{N}", names, flags)
    elif kind == "sp":
        mats, names = sp_basis(n)
        g = algebra_from_matrices(ctx, mats, f"sp_{2 * n}", names, flags)
    else:
        t, r = rootsystem.EXCEPTIONAL[kind]
        if (kind == "g2" and ctx.p == 3) or (kind == "e6" and ctx.p == 3):
            flags.append("not simple")
        T, names = rootsystem.chevalley_tensor(t, r)
        _integer_selfcheck(t, r)
        g = algebra_from_tensor(ctx, len(names), T.tolist(), f"{t}{r}", flags=tuple(flags), names=tuple(names))
    if g.dim != expected_dimension(kind, n or 0):
        raise BuildError(f"dimension {g.dim} does not match the type")
    if verify and g.realization is not None:
        for which in ("anticommutative", "jacobi"):
            rep = check_identity(g, which)
            if not rep.passed:
                raise BuildError(f"{which} fails on {rep.counterexample}")
    return g


_SELFCHECKED: dict[tuple[str, int], bool] = {}


def _integer_selfcheck(t: str, r: int):
    key = (t, r)
    if key not in _SELFCHECKED:
        T, names = rootsystem.chevalley_tensor(t, r)
        D = len(names)
        # anticommutativity over Z, Jacobi over Z (sampled beyond 140 dims)
        acc = {}
        for i, j, k, c in T.tolist():
            acc[(i, j, k)] = c
        for (i, j, k), c in acc.items():
            if acc.get((j, i, k), 0) != -c:
                raise BuildError("integer Chevalley constants are not antisymmetric")
        if D <= 140 and rootsystem.integer_jacobi_violations(T, D):
            raise BuildError("integer Chevalley constants violate Jacobi")
        _SELFCHECKED[key] = True


def heisenberg(ctx: FieldCtx) -> AlgebraSpec:
    """[x, y] = z, [y, x] = -z, everything else zero; z is central."""
    return algebra_from_tensor(ctx, 3, [(0, 1, 2, 1), (1, 0, 2, -1)], "heisenberg", names=("x", "y", "z"))


def random_anticommutative(ctx: FieldCtx, dim: int, seed: int, density: float = 0.5) -> AlgebraSpec:
    rng = np.random.default_rng(seed)
    entries = []
    for i in range(dim):
        for j in range(i + 1, dim):
            for k in range(dim):
                if rng.random() < density:
                    c = int(rng.integers(1, ctx.p))
                    entries.append((i, j, k, c))
                    entries.append((j, i, k, -c))
    return algebra_from_tensor(ctx, dim, entries, f"random_anticommutative_{dim}_{seed}")


def matrix_algebra(ctx: FieldCtx, n: int) -> AlgebraSpec:
    """Mat_n with the associative product as its multiplication."""
    entries = []
    idx = lambda i, j: i * n + j
    for i, j, l in itertools.product(range(n), repeat=3):
        entries.append((idx(i, j), idx(j, l), idx(i, l), 1))
    return algebra_from_tensor(ctx, n * n, entries, f"mat_{n}")


# identity checks -------------------------------------------------------------


@dataclass
class IdentityReport:
    which: str
    passed: bool
    mode: str  # "exhaustive" or "sampled"
    tuples_checked: int
    counterexample: tuple[int, ...] | None = None
    seed: int | None = None

    def describe(self, g: AlgebraSpec | None = None) -> str:
        if self.passed:
            return f"{self.which}: pass ({self.mode}, {self.tuples_checked} basis tuples)"
        names = ", ".join(g.name(i) if g else f"b{i + 1}" for i in self.counterexample)
        return f"{self.which}: counterexample ({names})"


ARITY = {"anticommutative": 2, "jacobi": 3, "malcev": 4, "associative": 3}


def _tuple_values(g: AlgebraSpec, which: str, tuples: np.ndarray) -> np.ndarray:
    """Evaluate the identity defect on basis tuples; rows of zeros mean pass."""
    E = np.eye(g.dim, dtype=np.int64)
    ctx = g.ctx
    br = g.bracket_many
    if which == "anticommutative":
        a, b = E[tuples[:, 0]], E[tuples[:, 1]]
        return ctx.add(br(a, b), br(b, a))
    if which == "jacobi":
        a, b, c = (E[tuples[:, t]] for t in range(3))
        return ctx.add(ctx.add(br(br(a, b), c), br(br(b, c), a)), br(br(c, a), b))
    if which == "associative":
        a, b, c = (E[tuples[:, t]] for t in range(3))
        return ctx.sub(br(br(a, b), c), br(a, br(b, c)))
    if which == "malcev":
        a, b, c, d = (E[tuples[:, t]] for t in range(4))
        s = br(br(br(a, b), c), d)
        s = ctx.add(s, br(br(br(b, c), d), a))
        s = ctx.add(s, br(br(br(c, d), a), b))
        s = ctx.add(s, br(br(br(d, a), b), c))
        return ctx.add(s, br(br(a, c), br(d, b)))
    raise ValueError(f"unknown identity {which}")


def _anticommutative_all(g: AlgebraSpec) -> tuple[int, ...] | None:
    rows = g.pair_rows
    bad = []
    for (i, j), row in rows.items():
        if i == j and row.any():
            bad.append((i, i))
        elif i != j:
            other = rows.get((j, i))
            s = row if other is None else g.ctx.add(row, other)
            if s.any():
                bad.append((min(i, j), max(i, j)))
    return min(bad) if bad else None


def _jacobi_pairs(g: AlgebraSpec, pairs, wanted=None) -> tuple[int, ...] | None:
    """Jacobi defect columns J_ij = sum_m c_ijm L_m + R_i L_j + R_j R_i (prime fields)."""
    p = g.ctx.p
    L, R = g.left_sparse, g.right_sparse
    rows = g.pair_rows
    bad = None
    for i, j in pairs:
        J = R[i] @ L[j] + R[j] @ R[i]
        row = rows.get((i, j))
        if row is not None:
            for m in np.nonzero(row)[0]:
                J = J + int(row[m]) * L[m]
        J = J.tocsr()
        J.data %= p
        J.eliminate_zeros()
        ks = sorted(set(J.nonzero()[1].tolist()))
        if wanted is not None:
            ks = [k for k in ks if k in wanted.get((i, j), ())]
        if ks:
            cand = (i, j, ks[0])
            if bad is None or cand < bad:
                bad = cand
            if wanted is None:
                return bad
    return bad


def check_identity(
    g: AlgebraSpec,
    which: str,
    samples: int = 100_000,
    seed: int = 0,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
) -> IdentityReport:
    """Verify an identity on basis tuples.

    By multilinearity, vanishing on all basis tuples implies the identity
    for all elements.  Above ``exhaustive_limit`` tuples a seeded sample is
    checked instead and the report says so.
    """
    arity = ARITY[which]
    D = g.dim
    total = D**arity
    exhaustive = total <= exhaustive_limit
    if which == "anticommutative":
        ce = _anticommutative_all(g)
        return IdentityReport(which, ce is None, "exhaustive", D * D, ce)
    if which == "jacobi" and g.ctx.k == 1:
        if exhaustive:
            ce = _jacobi_pairs(g, itertools.product(range(D), repeat=2))
            return IdentityReport(which, ce is None, "exhaustive", total, ce)
        rng = np.random.default_rng(seed)
        trip = rng.integers(0, D, size=(samples, 3))
        wanted: dict[tuple[int, int], set] = {}
        for i, j, k in trip.tolist():
            wanted.setdefault((i, j), set()).add(k)
        ce = _jacobi_pairs(g, sorted(wanted), wanted)
        return IdentityReport(which, ce is None, "sampled", samples, ce, seed)
    if exhaustive:
        tuples_iter = _product_chunks(D, arity)
        mode, count = "exhaustive", total
    else:
        rng = np.random.default_rng(seed)
        allt = rng.integers(0, D, size=(samples, arity))
        tuples_iter = (allt[s : s + 8192] for s in range(0, samples, 8192))
        mode, count = "sampled", samples
    best = None
    for chunk in tuples_iter:
        vals = _tuple_values(g, which, chunk)
        badrows = np.nonzero(vals.any(axis=1))[0]
        if badrows.size:
            cands = [tuple(int(t) for t in chunk[r]) for r in badrows]
            m = min(cands)
            best = m if best is None or m < best else best
            if mode == "exhaustive":
                break
    return IdentityReport(which, best is None, mode, count, best, None if mode == "exhaustive" else seed)


def _product_chunks(D: int, arity: int, size: int = 8192):
    """Basis tuples in lexicographic order, in chunks."""
    total = D**arity
    for s in range(0, total, size):
        idx = np.arange(s, min(total, s + size), dtype=np.int64)
        out = np.empty((len(idx), arity), dtype=np.int64)
        rest = idx.copy()
        for t in range(arity - 1, -1, -1):
            out[:, t] = rest % D
            rest //= D
        yield out


def is_lie(g: AlgebraSpec) -> bool:
    return check_identity(g, "anticommutative").passed and check_identity(g, "jacobi").passed


# simplicity -------------------------------------------------------------------


@dataclass
class SimplicityResult:
    simple: bool
    witness: Subspace | None
    tries: int
    note: str = ""


def spin(ctx: FieldCtx, v, gens: Sequence[np.ndarray], limit: int | None = None) -> Subspace:
    """Smallest subspace containing v and invariant under every matrix in gens."""
    dim = len(v)
    S = IncrementalSpan(ctx, dim)
    v = np.asarray(v, dtype=np.int64)
    queue = [v] if S.add(v) else []
    while queue:
        u = queue.pop()
        for M in gens:
            w = matmul(ctx, M, u)
            if S.add(w):
                queue.append(w)
                if limit is not None and S.dim >= limit:
                    return S.subspace()
    return S.subspace()


def is_invariant(g: AlgebraSpec, V: Subspace) -> bool:
    """[V, g] ⊆ V and [g, V] ⊆ V, checked on basis pairs."""
    if V.dim == 0:
        return True
    E = g.basis()
    Vr = np.repeat(V.rows, g.dim, axis=0)
    Et = np.tile(E, (V.dim, 1))
    left = g.bracket_many(Vr, Et)
    right = g.bracket_many(Et, Vr)
    return bool(V.contains_many(left).all() and V.contains_many(right).all())


def _module_generators(g: AlgebraSpec, rng, lie: bool):
    D = g.dim
    ctx = g.ctx
    if lie:
        for _ in range(8):
            G = [rng.integers(0, ctx.q, D) for _ in range(2)]
            mats = [g.left_matrix(x) for x in G]
            # the Lie subalgebra generated by G is the spin of span(G) under ad_G
            S = IncrementalSpan(ctx, D)
            for x in G:
                S.add(x)
            grown = spin_space(ctx, S, mats)
            if grown.dim == D:
                return mats
    mats = []
    for i in range(D):
        e = np.zeros(D, dtype=np.int64)
        e[i] = 1
        mats.append(g.left_matrix(e))
        if not lie:
            mats.append(g.right_matrix(e))
    return mats


def spin_space(ctx: FieldCtx, S: IncrementalSpan, gens) -> IncrementalSpan:
    queue = [r.copy() for r in S.rows]
    while queue:
        u = queue.pop()
        for M in gens:
            w = matmul(ctx, M, u)
            if S.add(w):
                queue.append(w)
    return S


def _projective_points(ctx: FieldCtx, basis: np.ndarray):
    r = len(basis)
    for coeffs in itertools.product(range(ctx.q), repeat=r):
        nz = [c for c in coeffs if c]
        if not nz or nz[0] != 1:
            continue
        yield matmul(ctx, np.array(coeffs, dtype=np.int64)[None, :], basis)[0]


def is_simple(g: AlgebraSpec, seed: int = 0, max_tries: int = 60, max_nullity: int = 2, lie: bool | None = None) -> SimplicityResult:
    """Irreducibility of g under its left and right multiplications.

    Norton's criterion: pick an element theta of the multiplication algebra
    with a small nonzero nullspace N.  If every nonzero v in N spins up to
    the whole space, and likewise every w in the nullspace of theta^T under
    the transposed action, no proper submodule exists.  Pass ``lie`` when
    the Lie identities are already known, to skip rechecking them.
    """
    ctx = g.ctx
    D = g.dim
    if D <= 1:
        return SimplicityResult(True, None, 0, "dimension <= 1")
    rng = np.random.default_rng(seed)
    if lie is None:
        lie = check_identity(g, "anticommutative").passed and check_identity(g, "jacobi").passed
    gens = _module_generators(g, rng, lie)
    gensT = [M.T.copy() for M in gens]
    I = np.eye(D, dtype=np.int64)
    for attempt in range(1, max_tries + 1):
        theta = np.zeros((D, D), dtype=np.int64)
        for _ in range(4):
            word = I
            for _ in range(int(rng.integers(1, 4))):
                word = matmul(ctx, gens[int(rng.integers(len(gens)))], word)
            theta = ctx.add(theta, ctx.mul(int(rng.integers(1, ctx.q)), word))
        best = None
        for c in range(ctx.q):
            M = ctx.sub(theta, ctx.mul(c, I))
            nul = D - rank(ctx, M)
            if 1 <= nul <= max_nullity and (best is None or nul < best[0]):
                best = (nul, M)
                if nul == 1:
                    break
        if best is None:
            continue
        M = best[1]
        for v in _projective_points(ctx, nullspace(ctx, M)):
            S = spin(ctx, v, gens)
            if S.dim < D:
                if not is_invariant(g, S):
                    raise AssertionError("spun subspace is not invariant")
                return SimplicityResult(False, S, attempt, "submodule meets the nullspace")
        for w in _projective_points(ctx, nullspace(ctx, M.T.copy())):
            S = spin(ctx, w, gensT)
            if S.dim < D:
                W = annihilator(S)
                if not is_invariant(g, W):
                    raise AssertionError("dual witness is not invariant")
                return SimplicityResult(False, W, attempt, "witness from the dual module")
        return SimplicityResult(True, None, attempt, f"nullity {best[0]} criterion")
    raise RuntimeError("no element with small nullspace found; inconclusive")


def centre(g: AlgebraSpec) -> Subspace:
    """{z : [z, b_i] = [b_i, z] = 0 for all i}."""
    E = g.basis()
    rowsL = [g.right_matrix(E[i]) for i in range(g.dim)]
    rowsR = [g.left_matrix(E[i]) for i in range(g.dim)]
    M = np.vstack(rowsL + rowsR)
    return echelon_span(g.ctx, nullspace(g.ctx, M), ambient=g.dim)


# turrifiability -----------------------------------------------------------------


@dataclass
class TurrifiabilityResult:
    status: str  # "pass", "violation", "inconclusive"
    violation: np.ndarray | None = None
    level: int | None = None
    sizes: dict = field(default_factory=dict)


def turrifiability_witness(g: AlgebraSpec, x, Y, k: int, budget: int = 200_000) -> TurrifiabilityResult:
    """Check S_{<=k}(x, Y) ⊆ span T_{<=k}(x, Y) by enumeration (a bounded witness only)."""
    from .growth import BudgetExceeded, tower_sets

    x = np.asarray(x, dtype=np.int64)
    Y = np.asarray(Y, dtype=np.int64).reshape(-1, g.dim)
    try:
        S = tower_sets(g, x[None, :], Y, k, "anchored_S", budget=budget)
        T = tower_sets(g, x[None, :], Y, k, "anchored_T", budget=budget)
    except BudgetExceeded as e:
        return TurrifiabilityResult("inconclusive", sizes={"reason": str(e)})
    span = echelon_span(g.ctx, np.vstack(T.levels), ambient=g.dim)
    sizes = {"S": [len(l) for l in S.levels], "T": [len(l) for l in T.levels], "span_dim": span.dim}
    for lvl, elems in enumerate(S.levels):
        inside = span.contains_many(elems)
        if not inside.all():
            bad = elems[np.nonzero(~inside)[0]]
            order = np.lexsort(bad.T[::-1])
            return TurrifiabilityResult("violation", bad[order[0]], lvl, sizes)
    return TurrifiabilityResult("pass", None, None, sizes)
