"""Finite fields GF(p^k) and exact linear algebra over them.

Field elements are integer indices in [0, q).  For k > 1 the index of the
polynomial c0 + c1 x + ... + c_{k-1} x^{k-1} is sum c_i p^i.  Vectors are
coordinate arrays; a whole vector is encoded big-endian in radix q, so that
index order and lexicographic coordinate order coincide.

All vectorised routines accept numpy integer arrays and broadcast.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

TABLE_LIMIT = 4096


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _poly_mod(a: list[int], m: Sequence[int], p: int) -> list[int]:
    a = [c % p for c in a]
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < dm:
            break
        f = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - f * c) % p
        a.pop()
    return a


def _is_irreducible(m: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    k = len(m) - 1
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            r = _poly_mod(list(m), list(low) + [1], p)
            if not any(r):
                return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k, low degree first."""
    if k == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=k):
        m = tuple(low) + (1,)
        if low[0] != 0 and _is_irreducible(m, p):
            return m
    raise FieldError(f"no irreducible polynomial of degree {k} over GF({p})")


class FieldCtx:
    """GF(p^k) with vectorised arithmetic on element indices."""

    def __init__(self, p: int, k: int = 1, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        if k < 1:
            raise FieldError("extension degree must be >= 1")
        self.p = p
        self.k = k
        self.q = p**k
        if modulus is None:
            modulus = smallest_irreducible(p, k)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree k")
        if k > 1 and not _is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is reducible over GF({p})")
        self.modulus = modulus
        if k > 1:
            if self.q > TABLE_LIMIT:
                raise FieldError(f"GF({p}^{k}) exceeds the table limit {TABLE_LIMIT}")
            self._build_tables()
        else:
            self._inv = np.zeros(p, dtype=np.int64)
            for a in range(1, p):
                self._inv[a] = pow(a, p - 2, p)

    def _build_tables(self):
        p, k, q = self.p, self.k, self.q
        digits = np.array([[(a // p**i) % p for i in range(k)] for a in range(q)], dtype=np.int64)
        weights = p ** np.arange(k, dtype=np.int64)
        self._digits = digits
        s = (digits[:, None, :] + digits[None, :, :]) % p
        self._add = (s @ weights).astype(np.int64)
        self._neg = ((-digits) % p) @ weights
        prod = np.zeros((q, q, 2 * k - 1), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                prod[:, :, i + j] += digits[:, None, i] * digits[None, :, j]
        prod %= p
        m = self.modulus
        for top in range(2 * k - 2, k - 1, -1):
            c = prod[:, :, top].copy()
            prod[:, :, top] = 0
            for i in range(k):
                prod[:, :, top - k + i] = (prod[:, :, top - k + i] - c * m[i]) % p
        self._mul = prod[:, :, :k] @ weights
        self._inv = np.zeros(q, dtype=np.int64)
        rows, cols = np.nonzero(self._mul == 1)
        self._inv[rows] = cols

    # vectorised arithmetic -------------------------------------------------
    def add(self, a, b):
        if self.k == 1:
            return (np.asarray(a) + b) % self.p
        return self._add[a, b]

    def neg(self, a):
        if self.k == 1:
            return (-np.asarray(a)) % self.p
        return self._neg[a]

    def sub(self, a, b):
        if self.k == 1:
            return (np.asarray(a) - b) % self.p
        return self._add[a, self._neg[b]]

    def mul(self, a, b):
        if self.k == 1:
            return (np.asarray(a) * b) % self.p
        return self._mul[a, b]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero")
        return self._inv[a]

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> GF(q)."""
        return int(n) % self.p

    def digits(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.k)]

    def in_prime_field(self, a: int) -> bool:
        return 0 <= a < self.p

    @property
    def elements(self) -> range:
        return range(self.q)

    # identity -------------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.p, self.k, self.modulus) == (
            other.p,
            other.k,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldCtx":
        return gf(int(obj["p"]), int(obj.get("k", 1)), tuple(obj.get("modulus") or ()) or None)


@lru_cache(maxsize=None)
def gf(p: int, k: int = 1, modulus: tuple | None = None) -> FieldCtx:
    return FieldCtx(p, k, modulus)


def field_of_order(q: int) -> FieldCtx:
    for p in range(2, q + 1):
        if q % p == 0:
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            if r != 1 or not is_prime(p):
                break
            return gf(p, k)
    raise FieldError(f"{q} is not a prime power")


@dataclass(frozen=True)
class FieldElement:
    ctx: FieldCtx
    value: int

    def _check(self, other: "FieldElement"):
        if not isinstance(other, FieldElement) or other.ctx != self.ctx:
            raise FieldError("operands live in different fields")

    def __add__(self, other):
        self._check(other)
        return FieldElement(self.ctx, int(self.ctx.add(self.value, other.value)))

    def __sub__(self, other):
        self._check(other)
        return FieldElement(self.ctx, int(self.ctx.sub(self.value, other.value)))

    def __mul__(self, other):
        self._check(other)
        return FieldElement(self.ctx, int(self.ctx.mul(self.value, other.value)))

    def __neg__(self):
        return FieldElement(self.ctx, int(self.ctx.neg(self.value)))

    def inv(self):
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero")
        return FieldElement(self.ctx, int(self.ctx.inv(self.value)))

    def __truediv__(self, other):
        self._check(other)
        return self * other.inv()


def subfield_lattice(ctx: FieldCtx) -> list[int]:
    return [ctx.p**d for d in range(1, ctx.k + 1) if ctx.k % d == 0]


# vector encoding ---------------------------------------------------------


def encode(ctx: FieldCtx, coords: Sequence[int]) -> int:
    n = 0
    for c in coords:
        n = n * ctx.q + int(c)
    return n


def decode(ctx: FieldCtx, dim: int, index: int) -> tuple[int, ...]:
    out = [0] * dim
    for i in range(dim - 1, -1, -1):
        index, out[i] = divmod(index, ctx.q)
    return tuple(out)


def fits_int64(ctx: FieldCtx, dim: int) -> bool:
    return ctx.q**dim < 2**62


def encode_many(ctx: FieldCtx, arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.int64)
    dim = arr.shape[-1]
    if not fits_int64(ctx, dim):
        raise OverflowError("vector space too large for int64 encoding")
    weights = ctx.q ** np.arange(dim - 1, -1, -1, dtype=np.int64)
    return arr @ weights


def decode_many(ctx: FieldCtx, dim: int, idx: np.ndarray) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    out = np.empty(idx.shape + (dim,), dtype=np.int64)
    rest = idx.copy()
    for i in range(dim - 1, -1, -1):
        out[..., i] = rest % ctx.q
        rest //= ctx.q
    return out


# row reduction -----------------------------------------------------------


def rref(ctx: FieldCtx, M) -> tuple[np.ndarray, list[int]]:
    """Fully reduced row echelon form (zero rows dropped) and pivot columns."""
    M = np.array(M, dtype=np.int64, copy=True)
    if M.ndim != 2 or M.shape[0] == 0:
        return M.reshape(0, M.shape[-1] if M.ndim == 2 else 0), []
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r] = ctx.mul(M[r], ctx.inv(M[r, c]))
        others = np.nonzero(M[:, c])[0]
        others = others[others != r]
        if others.size:
            M[others] = ctx.sub(M[others], ctx.mul(M[others, c][:, None], M[r][None, :]))
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rank(ctx: FieldCtx, M) -> int:
    return len(rref(ctx, M)[1])


def nullspace(ctx: FieldCtx, M) -> np.ndarray:
    """Basis (as rows) of {x : M x = 0}."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1]
    R, piv = rref(ctx, M)
    free = [c for c in range(n) if c not in piv]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for i, pc in enumerate(piv):
            basis[t, pc] = ctx.neg(R[i, f])
    return basis


def matmul(ctx: FieldCtx, A, B) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if ctx.k == 1:
        if ctx.p < 2**15 and A.shape[-1] < 2**30 // ctx.p**2:
            return (A @ B) % ctx.p
        return (A.astype(object) @ B.astype(object) % ctx.p).astype(np.int64)
    out = np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
    for t in range(A.shape[-1]):
        out = ctx.add(out, ctx.mul(A[..., t, None], B[t]))
    return out


def combine(ctx: FieldCtx, coeffs, rows) -> np.ndarray:
    """sum_i coeffs[i] * rows[i]."""
    return matmul(ctx, np.asarray(coeffs, dtype=np.int64)[None, :], rows)[0]


# subspaces -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear (translation None) or affine subspace in fully reduced echelon form."""

    ctx: FieldCtx
    ambient: int
    rows: np.ndarray
    pivots: tuple[int, ...]
    translation: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return len(self.pivots)

    @property
    def is_linear(self) -> bool:
        return self.translation is None or not self.translation.any()

    def reduce(self, v) -> np.ndarray:
        v = np.array(v, dtype=np.int64)
        for r, c in zip(self.rows, self.pivots):
            if v[c]:
                v = self.ctx.sub(v, self.ctx.mul(v[c], r))
        return v

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64)
        if self.translation is not None:
            v = self.ctx.sub(v, self.translation)
        return not self.reduce(v).any()

    def contains_many(self, arr) -> np.ndarray:
        """Vectorised membership for an (n, D) array."""
        arr = np.asarray(arr, dtype=np.int64).reshape(-1, self.ambient)
        if self.translation is not None:
            arr = self.ctx.sub(arr, self.translation[None, :])
        for r, c in zip(self.rows, self.pivots):
            arr = self.ctx.sub(arr, self.ctx.mul(arr[:, c][:, None], r[None, :]))
        return ~arr.any(axis=1)

    def linear_part(self) -> "Subspace":
        return Subspace(self.ctx, self.ambient, self.rows, self.pivots, None)

    def elements(self) -> np.ndarray:
        """All members as an (q^dim, D) array; desk scale only."""
        q = self.ctx.q
        coeffs = np.array(list(itertools.product(range(q), repeat=self.dim)), dtype=np.int64).reshape(
            -1, self.dim
        )
        if self.dim == 0:
            out = np.zeros((1, self.ambient), dtype=np.int64)
        else:
            out = matmul(self.ctx, coeffs, self.rows)
        if self.translation is not None:
            out = self.ctx.add(out, self.translation[None, :])
        return out

    def size(self) -> int:
        return self.ctx.q**self.dim

    def key(self):
        t = None if self.translation is None else tuple(int(x) for x in self.translation)
        return (self.ambient, tuple(map(tuple, self.rows.tolist())), t)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.ctx == other.ctx and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        kind = "Subspace" if self.translation is None else "AffineSubspace"
        return f"{kind}(dim={self.dim}, ambient={self.ambient}, rows={self.rows.tolist()})"


class IncrementalSpan:
    """Fully reduced echelon basis grown one vector at a time."""

    def __init__(self, ctx: FieldCtx, ambient: int):
        self.ctx = ctx
        self.ambient = ambient
        self.rows = np.zeros((0, ambient), dtype=np.int64)
        self.pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def reduce(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        if self.pivots:
            coef = v[self.pivots]
            v = self.ctx.sub(v, combine(self.ctx, coef, self.rows))
        return v

    def add(self, v) -> bool:
        """Insert v; return True when it enlarged the span."""
        ctx = self.ctx
        v = self.reduce(v)
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            return False
        c = int(nz[0])
        v = ctx.mul(v, ctx.inv(v[c]))
        if self.pivots:
            f = self.rows[:, c].copy()
            hit = np.nonzero(f)[0]
            if hit.size:
                self.rows[hit] = ctx.sub(self.rows[hit], ctx.mul(f[hit][:, None], v[None, :]))
        pos = int(np.searchsorted(self.pivots, c))
        self.rows = np.insert(self.rows, pos, v, axis=0)
        self.pivots.insert(pos, c)
        return True

    def subspace(self) -> "Subspace":
        return Subspace(self.ctx, self.ambient, self.rows.copy(), tuple(self.pivots))


def echelon_span(ctx: FieldCtx, vectors, ambient: int | None = None) -> Subspace:
    arr = np.asarray(list(vectors) if not isinstance(vectors, np.ndarray) else vectors, dtype=np.int64)
    if arr.size == 0:
        if ambient is None:
            raise ValueError("ambient dimension needed for an empty span")
        return Subspace(ctx, ambient, np.zeros((0, ambient), dtype=np.int64), ())
    arr = arr.reshape(-1, arr.shape[-1])
    if ambient is not None and arr.shape[1] != ambient:
        raise ValueError("dimension mismatch")
    R, piv = rref(ctx, arr)
    return Subspace(ctx, arr.shape[1], R, tuple(piv))


def affine_span(ctx: FieldCtx, base, directions, ambient: int | None = None) -> Subspace:
    """base + span(directions), with the canonical (smallest-index) translation."""
    base = np.asarray(base, dtype=np.int64)
    lin = echelon_span(ctx, directions, ambient=len(base))
    t = Subspace(ctx, lin.ambient, lin.rows, lin.pivots).reduce(base)
    return Subspace(ctx, lin.ambient, lin.rows, lin.pivots, t)


def whole_space(ctx: FieldCtx, dim: int) -> Subspace:
    return echelon_span(ctx, np.eye(dim, dtype=np.int64), ambient=dim)


def zero_space(ctx: FieldCtx, dim: int) -> Subspace:
    return echelon_span(ctx, [], ambient=dim)


def sum_spaces(a: Subspace, b: Subspace) -> Subspace:
    return echelon_span(a.ctx, np.vstack([a.rows, b.rows]), ambient=a.ambient)


def complement_basis(sub: Subspace) -> np.ndarray:
    """Standard basis vectors completing sub.rows to a basis of the ambient space."""
    free = [c for c in range(sub.ambient) if c not in sub.pivots]
    return np.eye(sub.ambient, dtype=np.int64)[free]


def coordinates(sub: Subspace, v) -> np.ndarray:
    """Coefficients of v (assumed in the linear span) on the echelon rows."""
    v = np.asarray(v, dtype=np.int64)
    return v[list(sub.pivots)].copy()


def annihilator(sub: Subspace) -> Subspace:
    """{w : w . r = 0 for every row r}."""
    if sub.dim == 0:
        return whole_space(sub.ctx, sub.ambient)
    return echelon_span(sub.ctx, nullspace(sub.ctx, sub.rows), ambient=sub.ambient)


# linear maps ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LinearMap:
    ctx: FieldCtx
    matrix: np.ndarray  # shape (out, in); f(x) = matrix @ x + constant
    constant: np.ndarray | None = None
    word: str = ""

    @property
    def homogeneous(self) -> bool:
        return self.constant is None or not np.any(self.constant)

    def __call__(self, v) -> np.ndarray:
        out = matmul(self.ctx, self.matrix, np.asarray(v, dtype=np.int64))
        if self.constant is not None:
            out = self.ctx.add(out, self.constant)
        return out

    def apply_many(self, arr) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.int64).reshape(-1, self.matrix.shape[1])
        out = matmul(self.ctx, arr, self.matrix.T)
        if self.constant is not None:
            out = self.ctx.add(out, self.constant[None, :])
        return out

    def compose(self, inner: "LinearMap") -> "LinearMap":
        m = matmul(self.ctx, self.matrix, inner.matrix)
        c = None
        if inner.constant is not None:
            c = matmul(self.ctx, self.matrix, inner.constant)
        if self.constant is not None:
            c = self.constant if c is None else self.ctx.add(c, self.constant)
        return LinearMap(self.ctx, m, c, f"{self.word}∘{inner.word}")


def identity_map(ctx: FieldCtx, dim: int) -> LinearMap:
    return LinearMap(ctx, np.eye(dim, dtype=np.int64), None, "id")


def image_and_fibre(f: LinearMap, X: Subspace) -> tuple[Subspace, int]:
    """f(X) as an affine space and the common dimension of its nonempty fibres."""
    ctx = f.ctx
    out_dim = f.matrix.shape[0]
    dirs = matmul(ctx, X.rows, f.matrix.T) if X.dim else np.zeros((0, out_dim), dtype=np.int64)
    base_in = X.translation if X.translation is not None else np.zeros(X.ambient, dtype=np.int64)
    base = f(base_in)
    if X.translation is None and f.homogeneous:
        img = echelon_span(ctx, dirs, ambient=out_dim)
    else:
        img = affine_span(ctx, base, dirs)
    return img, X.dim - img.dim


def fibre(f: LinearMap, X: Subspace, y) -> Subspace | None:
    """{x in X : f(x) = y} as an affine space, or None when empty."""
    ctx = f.ctx
    y = np.asarray(y, dtype=np.int64)
    # x = t + sum c_i r_i ; f(x) = f(t) + sum c_i M r_i
    t = X.translation if X.translation is not None else np.zeros(X.ambient, dtype=np.int64)
    rhs = ctx.sub(y, f(t))
    cols = matmul(ctx, f.matrix, X.rows.T) if X.dim else np.zeros((len(y), 0), dtype=np.int64)
    aug = np.hstack([cols, rhs[:, None]])
    R, piv = rref(ctx, aug)
    if X.dim in piv:
        return None
    part = np.zeros(X.dim, dtype=np.int64)
    for i, c in enumerate(piv):
        part[c] = R[i, -1]
    null = nullspace(ctx, cols) if X.dim else np.zeros((0, 0), dtype=np.int64)
    base = ctx.add(t, combine(ctx, part, X.rows)) if X.dim else t
    dirs = matmul(ctx, null, X.rows) if len(null) else np.zeros((0, X.ambient), dtype=np.int64)
    return affine_span(ctx, base, dirs)


@dataclass
class FibreBound:
    holds: bool
    lhs: int
    image_count: int
    max_fibre: int
    fibre_space: Subspace | None
    fibre_value: tuple | None


class PreconditionError(ValueError):
    pass


def fibre_counting_bound(ctx: FieldCtx, A_t1, A_t2, f: LinearMap, X: Subspace, Ak) -> FibreBound:
    """Count (A_t1 x A_t2) ∩ X against |Ak ∩ f(X)| times the largest fibre.

    f acts on concatenated pairs (x, y) of length 2D.  The precondition
    f(A_t1 x A_t2) ⊆ Ak is checked on the whole product.
    """
    A1 = np.asarray(A_t1, dtype=np.int64)
    A2 = np.asarray(A_t2, dtype=np.int64)
    D = A1.shape[1]
    pairs = np.hstack([np.repeat(A1, len(A2), axis=0), np.tile(A2, (len(A1), 1))])
    vals = f.apply_many(pairs)
    ak_keys = {tuple(r) for r in np.asarray(Ak, dtype=np.int64).tolist()}
    for r in vals.tolist():
        if tuple(r) not in ak_keys:
            raise PreconditionError(f"f maps a pair outside Ak: {r}")
    inside = X.contains_many(pairs)
    lhs = int(inside.sum())
    img, _ = image_and_fibre(f, X)
    image_count = sum(1 for r in ak_keys if img.contains(np.array(r)))
    counts: dict[tuple, int] = {}
    for r in vals[inside].tolist():
        counts[tuple(r)] = counts.get(tuple(r), 0) + 1
    if counts:
        best = min(counts, key=lambda t: (-counts[t], t))
        mx = counts[best]
        W = fibre(f, X, np.array(best))
    else:
        best, mx, W = None, 0, None
    del D
    return FibreBound(lhs <= image_count * mx, lhs, image_count, mx, W, best)
