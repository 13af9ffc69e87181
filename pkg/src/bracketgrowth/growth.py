"""Growth of symmetric sets under + and the bracket.

Layers follow the convolution definition literally: L_m is the union over
split points j of L_j + L_{m-j} and of the brackets [L_j, L_{m-j}] in both
orders.  This is not the k-step closure; ``generated_subalgebra`` provides
the fast closure for questions that only concern <A>.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .algebra import AlgebraSpec
from .kernel import (
    FieldCtx,
    IncrementalSpan,
    Subspace,
    decode_many,
    echelon_span,
    encode_many,
    fits_int64,
    gf,
)

BITSET_LIMIT = 2**28
PAIR_CHUNK = 4_000_000


class BudgetExceeded(RuntimeError):
    pass


class NotGenerating(ValueError):
    pass


# set representations -----------------------------------------------------------


class _Bitset:
    tag = "bitset"

    def __init__(self, ctx: FieldCtx, dim: int):
        self.ctx, self.dim = ctx, dim
        self.bits = np.zeros(ctx.q**dim, dtype=bool)

    def add(self, coords: np.ndarray):
        if len(coords):
            self.bits[encode_many(self.ctx, coords)] = True

    def count(self) -> int:
        return int(self.bits.sum())

    def coords(self) -> np.ndarray:
        return decode_many(self.ctx, self.dim, np.flatnonzero(self.bits)).reshape(-1, self.dim)


class _Hashed:
    tag = "hash"

    def __init__(self, ctx: FieldCtx, dim: int):
        self.ctx, self.dim = ctx, dim
        self.items: dict[bytes, np.ndarray] = {}

    def add(self, coords: np.ndarray):
        coords = np.ascontiguousarray(coords, dtype=np.int64)
        for row in coords:
            key = row.tobytes()
            if key not in self.items:
                self.items[key] = row.copy()

    def count(self) -> int:
        return len(self.items)

    def coords(self) -> np.ndarray:
        if not self.items:
            return np.zeros((0, self.dim), dtype=np.int64)
        return canonical(np.array(list(self.items.values()), dtype=np.int64))


def canonical(coords) -> np.ndarray:
    """Distinct rows in lexicographic (equivalently, index) order."""
    coords = np.asarray(coords, dtype=np.int64)
    if coords.ndim == 1:
        coords = coords[None, :]
    if len(coords) == 0:
        return coords.reshape(0, coords.shape[-1])
    return np.unique(coords, axis=0)


def choose_representation(ctx: FieldCtx, dim: int, limit: int = BITSET_LIMIT) -> str:
    return "bitset" if fits_int64(ctx, dim) and ctx.q**dim <= limit else "hash"


def _store(ctx, dim, representation):
    return _Bitset(ctx, dim) if representation == "bitset" else _Hashed(ctx, dim)


# pairwise operations ---------------------------------------------------------------


def pairwise_sums(ctx: FieldCtx, X: np.ndarray, Y: np.ndarray) -> Iterator[np.ndarray]:
    if len(X) == 0 or len(Y) == 0:
        return
    D = X.shape[1]
    step = max(1, PAIR_CHUNK // max(1, len(Y) * D))
    for s in range(0, len(X), step):
        yield ctx.add(X[s : s + step, None, :], Y[None, :, :]).reshape(-1, D)


def pairwise_brackets(g: AlgebraSpec, X: np.ndarray, Y: np.ndarray) -> Iterator[np.ndarray]:
    if len(X) == 0 or len(Y) == 0:
        return
    D = g.dim
    step = max(1, PAIR_CHUNK // max(1, len(Y) * D))
    for s in range(0, len(X), step):
        yield g.bracket_outer(X[s : s + step], Y).reshape(-1, D)


# growth sets -----------------------------------------------------------------------


def symmetric_closure(g: AlgebraSpec, elements) -> np.ndarray:
    """Smallest symmetric set containing the given elements."""
    E = np.asarray(elements, dtype=np.int64).reshape(-1, g.dim)
    return canonical(np.vstack([np.zeros((1, g.dim), dtype=np.int64), E, g.ctx.neg(E)]))


def is_symmetric(g: AlgebraSpec, coords: np.ndarray) -> bool:
    A = canonical(coords)
    return bool(len(A)) and not A[0].any() and np.array_equal(A, canonical(g.ctx.neg(A)))


@dataclass
class GrowthSet:
    """A symmetric set A with its exactly computed layers L_1 = A, L_2, ..."""

    g: AlgebraSpec
    layers: list[np.ndarray]
    representation: str
    truncated: bool = False
    truncation_note: str = ""

    @classmethod
    def from_elements(cls, g: AlgebraSpec, elements, representation: str | None = None, symmetrize: bool = False):
        A = symmetric_closure(g, elements) if symmetrize else canonical(np.asarray(elements).reshape(-1, g.dim))
        if not is_symmetric(g, A):
            raise ValueError("set is not symmetric (needs 0 and closure under negation)")
        rep = representation or choose_representation(g.ctx, g.dim)
        return cls(g, [A], rep)

    @property
    def base(self) -> np.ndarray:
        return self.layers[0]

    def layer(self, k: int) -> np.ndarray:
        if k == 0:
            return np.zeros((1, self.g.dim), dtype=np.int64)
        if k > len(self.layers):
            grow_layers(self, k)
            if k > len(self.layers):
                raise BudgetExceeded(self.truncation_note or f"layer {k} not available")
        return self.layers[k - 1]

    def size(self, k: int) -> int:
        return len(self.layer(k))

    def sizes(self) -> list[int]:
        return [len(l) for l in self.layers]

    def codes(self, k: int) -> list[int]:
        from .kernel import encode

        return [encode(self.g.ctx, row) for row in self.layer(k)]

    def contains(self, k: int, v) -> bool:
        L = self.layer(k)
        v = np.asarray(v, dtype=np.int64)
        return bool((L == v).all(axis=1).any())

    def contains_many(self, k: int, V) -> np.ndarray:
        L = self.layer(k)
        keys = {row.tobytes() for row in np.ascontiguousarray(L)}
        V = np.ascontiguousarray(np.asarray(V, dtype=np.int64).reshape(-1, self.g.dim))
        return np.array([row.tobytes() in keys for row in V], dtype=bool)

    def to_json(self) -> dict:
        return {"algebra": self.g.label, "elements": self.base.tolist()}

    @classmethod
    def from_json(cls, g: AlgebraSpec, obj: dict, **kw) -> "GrowthSet":
        return cls.from_elements(g, np.array(obj["elements"], dtype=np.int64).reshape(-1, g.dim), **kw)


def full_size(g: AlgebraSpec) -> int:
    return g.ctx.q**g.dim


def _stabilized(sizes: list[int]) -> int | None:
    """Least k with |L_k| = |L_2k| among computed layers (then L_k = <A>)."""
    for k in range(1, len(sizes) // 2 + 1):
        if sizes[k - 1] == sizes[2 * k - 1]:
            return k
    return None


def grow_layers(
    A: GrowthSet,
    k: int,
    max_elements: int | None = None,
    max_pairs: int | None = None,
    short_circuit: bool = True,
) -> GrowthSet:
    """Extend A.layers to L_1..L_k in place (and return A).

    Short cuts, all of which are consequences of monotonicity: once a
    layer is the whole algebra, or has the size of <A>, or the layers have
    stabilised (L_j = ... = L_2j), later layers are copies.  On budget
    overflow the set is marked truncated and the layer list stops early.
    """
    g = A.g
    ctx = g.ctx
    full = full_size(g)
    closure = None
    while len(A.layers) < k:
        m = len(A.layers) + 1
        prev = A.layers[-1]
        if short_circuit:
            if len(prev) == full or _stabilized(A.sizes()) is not None:
                A.layers.append(prev)
                continue
            if closure is None:
                closure = closure_size(g, A.base)
            if len(prev) == closure:
                A.layers.append(prev)
                continue
        if max_pairs is not None:
            pairs = sum(len(A.layers[j - 1]) * len(A.layers[m - j - 1]) for j in range(1, m // 2 + 1))
            if 3 * pairs > max_pairs:
                A.truncated = True
                A.truncation_note = f"layer {m} needs {3 * pairs} pair operations"
                return A
        acc = _store(ctx, g.dim, A.representation)
        for j in range(1, m // 2 + 1):
            X, Y = A.layers[j - 1], A.layers[m - j - 1]
            for chunk in pairwise_sums(ctx, X, Y):
                acc.add(chunk)
            for chunk in pairwise_brackets(g, X, Y):
                acc.add(chunk)
            if j != m - j:
                for chunk in pairwise_brackets(g, Y, X):
                    acc.add(chunk)
        if max_elements is not None and acc.count() > max_elements:
            A.truncated = True
            A.truncation_note = f"layer {m} has {acc.count()} > {max_elements} elements"
            return A
        A.layers.append(acc.coords())
    return A


# fast closure -----------------------------------------------------------------------


def _flatten(ctx: FieldCtx, V: np.ndarray) -> np.ndarray:
    """Coordinates over the prime field (k digits per coordinate)."""
    V = np.asarray(V, dtype=np.int64)
    if ctx.k == 1:
        return V
    out = np.empty(V.shape[:-1] + (V.shape[-1] * ctx.k,), dtype=np.int64)
    rest = V.copy()
    for t in range(ctx.k):
        out[..., t :: ctx.k] = rest % ctx.p
        rest //= ctx.p
    return out


def _unflatten(ctx: FieldCtx, W: np.ndarray) -> np.ndarray:
    W = np.asarray(W, dtype=np.int64)
    if ctx.k == 1:
        return W
    out = np.zeros(W.shape[:-1] + (W.shape[-1] // ctx.k,), dtype=np.int64)
    for t in range(ctx.k - 1, -1, -1):
        out = out * ctx.p + W[..., t :: ctx.k]
    return out


def generated_subalgebra(g: AlgebraSpec, elements) -> np.ndarray:
    """Prime-field basis (as algebra vectors) of <A>, the additive closure
    under brackets.  For a symmetric A the additive subgroup generated is
    the F_p-span, so <A> is the smallest F_p-subspace containing A and
    closed under the bracket.  This is the fast closure, not a layer."""
    ctx = g.ctx
    Fp = gf(ctx.p)
    E = np.asarray(elements, dtype=np.int64).reshape(-1, g.dim)
    S = IncrementalSpan(Fp, g.dim * ctx.k)
    basis: list[np.ndarray] = []
    queue: list[np.ndarray] = []
    for v in E:
        if S.add(_flatten(ctx, v)):
            basis.append(v)
            queue.append(v)
    while queue:
        u = queue.pop()
        B = np.array(basis, dtype=np.int64)
        U = np.repeat(u[None, :], len(B), axis=0)
        for w in np.vstack([g.bracket_many(U, B), g.bracket_many(B, U)]):
            if S.add(_flatten(ctx, w)):
                basis.append(w)
                queue.append(w)
    return np.array(basis, dtype=np.int64).reshape(-1, g.dim)


def closure_size(g: AlgebraSpec, elements) -> int:
    return g.ctx.p ** len(generated_subalgebra(g, elements))


def generates(g: AlgebraSpec, elements) -> bool:
    return len(generated_subalgebra(g, elements)) == g.dim * g.ctx.k


def closure_elements(g: AlgebraSpec, elements) -> np.ndarray:
    """All of <A> (desk scale)."""
    ctx = g.ctx
    B = _flatten(ctx, generated_subalgebra(g, elements))
    sub = echelon_span(gf(ctx.p), B, ambient=g.dim * ctx.k) if len(B) else None
    if sub is None:
        return np.zeros((1, g.dim), dtype=np.int64)
    return canonical(_unflatten(ctx, sub.elements()))


# bracket-only sets and towers ---------------------------------------------------------


@dataclass
class TowerSet:
    variant: str
    levels: list[np.ndarray]  # levels[j] is the j-th set, levels[0] = {0}

    def upto(self, k: int) -> np.ndarray:
        return canonical(np.vstack(self.levels[: k + 1]))


VARIANTS = ("bracket_only", "towers", "anchored_S", "anchored_T")


def _bracket_union(g, pairs, budget):
    out = []
    total = 0
    for X, Y in pairs:
        for chunk in pairwise_brackets(g, X, Y):
            out.append(chunk)
            total += len(chunk)
            if budget is not None and total > budget:
                raise BudgetExceeded(f"more than {budget} bracket evaluations")
    if not out:
        return np.zeros((0, g.dim), dtype=np.int64)
    return canonical(np.vstack(out))


def tower_sets(g: AlgebraSpec, X, Y, k: int, variant: str, budget: int | None = 2_000_000) -> TowerSet:
    """Explicit enumeration of X^[j], T_j(X), S_j(X, Y) or T_j(X, Y) for j <= k."""
    X = canonical(np.asarray(X).reshape(-1, g.dim))
    zero = np.zeros((1, g.dim), dtype=np.int64)
    if variant == "bracket_only":
        lv = [zero, X]
        for m in range(2, k + 1):
            lv.append(_bracket_union(g, [(lv[j], lv[m - j]) for j in range(1, m)], budget))
        return TowerSet(variant, lv[: k + 1])
    if variant == "towers":
        lv = [zero, X]
        for m in range(2, k + 1):
            lv.append(_bracket_union(g, [(lv[m - 1], X), (X, lv[m - 1])], budget))
        return TowerSet(variant, lv[: k + 1])
    Y = canonical(np.asarray(Y).reshape(-1, g.dim))
    if variant == "anchored_S":
        Yb = tower_sets(g, Y, None, k, "bracket_only", budget).levels
        lv = [zero, X]
        for m in range(2, k + 1):
            pairs = []
            for j in range(1, m):
                pairs.append((lv[j], Yb[m - j]))
                pairs.append((Yb[j], lv[m - j]))
            lv.append(_bracket_union(g, pairs, budget))
        return TowerSet(variant, lv[: k + 1])
    if variant == "anchored_T":
        Ty = tower_sets(g, Y, None, k, "towers", budget).levels
        lv = [zero, X]
        for m in range(2, k + 1):
            prev = lv[m - 1]
            lv.append(_bracket_union(g, [(prev, Y), (Y, prev), (Ty[m - 1], X), (X, Ty[m - 1])], budget))
        return TowerSet(variant, lv[: k + 1])
    raise ValueError(f"unknown variant {variant}")


@dataclass
class BracketLayers:
    levels: list[np.ndarray]
    eq1_holds: bool | None
    eq1_failure: np.ndarray | None = None


def bracket_layers(A: GrowthSet, k: int, check: bool = True, budget: int | None = 2_000_000) -> BracketLayers:
    """X^[1..k] plus the check X^k ⊆ additive span of X^[<=k]."""
    g = A.g
    T = tower_sets(g, A.base, None, k, "bracket_only", budget)
    if not check:
        return BracketLayers(T.levels, None)
    ctx = g.ctx
    Fp = gf(ctx.p)
    span = echelon_span(Fp, _flatten(ctx, T.upto(k)), ambient=g.dim * ctx.k)
    Lk = A.layer(k)
    inside = span.contains_many(_flatten(ctx, Lk))
    if inside.all():
        return BracketLayers(T.levels, True)
    return BracketLayers(T.levels, False, Lk[np.nonzero(~inside)[0][0]])


# span-level towers ------------------------------------------------------------------


def independent_rows(ctx: FieldCtx, dim: int, candidates, start: IncrementalSpan | None = None):
    """Greedy selection of candidate rows that enlarge the span."""
    S = start if start is not None else IncrementalSpan(ctx, dim)
    keep = []
    for t, v in enumerate(np.asarray(candidates, dtype=np.int64).reshape(-1, dim)):
        if S.add(v):
            keep.append(t)
    return keep, S


@dataclass
class SpanLevels:
    """Per-level bases of span(level) made of genuine elements of the level."""

    elements: list[np.ndarray]  # elements[j]: chosen genuine members of level j
    level_spans: list[Subspace]
    cumulative: list[Subspace]  # span of levels <= j

    def dim(self, k: int) -> int:
        return self.cumulative[min(k, len(self.cumulative) - 1)].dim


def _levels_from_bases(ctx, dim, per_level):
    spans, cum = [], []
    C = IncrementalSpan(ctx, dim)
    for E in per_level:
        spans.append(echelon_span(ctx, E, ambient=dim))
        for v in E:
            C.add(v)
        cum.append(C.subspace())
    return SpanLevels(per_level, spans, cum)


def _span_pick(g: AlgebraSpec, cands: np.ndarray) -> np.ndarray:
    keep, _ = independent_rows(g.ctx, g.dim, cands)
    return np.asarray(cands).reshape(-1, g.dim)[keep]


def _outer_both(g, U, V, both=True):
    if len(U) == 0 or len(V) == 0:
        return np.zeros((0, g.dim), dtype=np.int64)
    parts = [g.bracket_outer(U, V).reshape(-1, g.dim)]
    if both:
        parts.append(g.bracket_outer(V, U).reshape(-1, g.dim))
    return np.vstack(parts)


def tower_span_levels(g: AlgebraSpec, X, k: int) -> SpanLevels:
    """span T_j(X) for j <= k via span T_j = span([B_{j-1}, B_1] ∪ [B_1, B_{j-1}])."""
    zero = np.zeros((0, g.dim), dtype=np.int64)
    B1 = _span_pick(g, X)
    per = [zero, B1]
    for m in range(2, k + 1):
        per.append(_span_pick(g, _outer_both(g, per[m - 1], B1)))
    return _levels_from_bases(g.ctx, g.dim, per)


def bracket_span_levels(g: AlgebraSpec, X, k: int) -> SpanLevels:
    """span X^[j] for j <= k."""
    zero = np.zeros((0, g.dim), dtype=np.int64)
    per = [zero, _span_pick(g, X)]
    for m in range(2, k + 1):
        cands = [_outer_both(g, per[j], per[m - j], both=False) for j in range(1, m)]
        per.append(_span_pick(g, np.vstack(cands)))
    return _levels_from_bases(g.ctx, g.dim, per)


@dataclass
class TowerMap:
    """y -> matrix @ y, obtained by replacing the anchor of an anchored tower by y.

    A tower of weight w sends A^t into A^{t+w-1}."""

    matrix: np.ndarray
    weight: int
    word: str
    value: np.ndarray


def anchored_tower_maps(g: AlgebraSpec, x, Y, k: int) -> list[list[TowerMap]]:
    """Per level j <= k, tower maps whose values form a basis of span T_j(x, Y)."""
    ctx = g.ctx
    D = g.dim
    x = np.asarray(x, dtype=np.int64)
    Yb = _span_pick(g, Y)
    # genuine basis of span T_j(Y), with words
    ty: list[list[tuple[np.ndarray, str]]] = [[], [(y, f"y{t}") for t, y in enumerate(Yb)]]
    for m in range(2, k):
        cands = []
        for u, w in ty[m - 1]:
            for t, y in enumerate(Yb):
                cands.append((g.bracket(u, y), f"[{w},y{t}]"))
                cands.append((g.bracket(y, u), f"[y{t},{w}]"))
        keep, _ = independent_rows(ctx, D, [c for c, _ in cands]) if cands else ([], None)
        ty.append([cands[t] for t in keep])
    I = np.eye(D, dtype=np.int64)
    levels: list[list[TowerMap]] = [[], [TowerMap(I, 1, "x", x)]]
    Lm = {t: g.left_matrix(y) for t, y in enumerate(Yb)}
    Rm = {t: g.right_matrix(y) for t, y in enumerate(Yb)}
    from .kernel import matmul

    for m in range(2, k + 1):
        cands: list[TowerMap] = []
        for f in levels[m - 1]:
            for t in range(len(Yb)):
                cands.append(TowerMap(matmul(ctx, Rm[t], f.matrix), m, f"[{f.word},y{t}]", None))
                cands.append(TowerMap(matmul(ctx, Lm[t], f.matrix), m, f"[y{t},{f.word}]", None))
        for tau, w in ty[m - 1] if m - 1 < len(ty) else []:
            cands.append(TowerMap(g.left_matrix(tau), m, f"[{w},x]", None))
            cands.append(TowerMap(g.right_matrix(tau), m, f"[x,{w}]", None))
        for c in cands:
            c.value = matmul(ctx, c.matrix, x)
        keep, _ = independent_rows(ctx, D, [c.value for c in cands]) if cands else ([], None)
        levels.append([cands[t] for t in keep])
    return levels


def anchored_span_levels(g: AlgebraSpec, x, Y, k: int) -> SpanLevels:
    maps = anchored_tower_maps(g, x, Y, k)
    per = [np.array([f.value for f in lvl], dtype=np.int64).reshape(-1, g.dim) for lvl in maps]
    return _levels_from_bases(g.ctx, g.dim, per)


# dichotomy, stabilisation, escape ------------------------------------------------------------


@dataclass
class OlsonResult:
    closed: bool
    grew: bool
    size_k: int
    size_4k: int
    size_6k: int
    closure: int

    @property
    def holds(self) -> bool:
        return self.closed or self.grew

    @property
    def horn(self) -> str:
        return "closed" if self.closed else ("grew" if self.grew else "neither")


def olson_dichotomy(A: GrowthSet, k: int, **budget) -> OlsonResult:
    """Either A^{4k} = <A> or |A^{6k}| >= (3/2)|A^k| (integer comparison)."""
    grow_layers(A, 6 * k, **budget)
    if len(A.layers) < 6 * k:
        raise BudgetExceeded(A.truncation_note)
    c = closure_size(A.g, A.base)
    s1, s4, s6 = A.size(k), A.size(4 * k), A.size(6 * k)
    return OlsonResult(s4 == c, 2 * s6 >= 3 * s1, s1, s4, s6, c)


@dataclass
class Stabilization:
    k: int
    dim: int
    horizon: int
    dims: list[int]


def span_stabilization(A: GrowthSet, horizon_factor: int = 4) -> Stabilization:
    """Least k with span(A^k) = span(A^{k+1}) = ... = span(A^{2k}).

    span_K(A^k) = span_K(A^[<=k]) because A^[j] ⊆ A^k for j <= k and A^k
    lies in the additive span of A^[<=k]; so bracket-only spans suffice."""
    g = A.g
    k = 1
    while True:
        S = bracket_span_levels(g, A.base, horizon_factor * k)
        dims = [S.dim(j) for j in range(1, horizon_factor * k + 1)]
        if dims[k - 1] == dims[2 * k - 1]:
            if dims[k - 1] != dims[-1]:
                raise AssertionError("span changed after stabilising")
            return Stabilization(k, dims[k - 1], horizon_factor * k, dims)
        k += 1


@dataclass
class Escape:
    mode: str
    d: int
    witness: np.ndarray
    dim: int
    required: int

    @property
    def holds(self) -> bool:
        return self.dim >= self.required


def span_escape(A: GrowthSet | np.ndarray, d: int, mode: str, v=None, g: AlgebraSpec | None = None, check_generating: bool = True) -> Escape:
    """Span dimension of the escape witness set of the given mode.

    general: A^[<=2^{d-1}]; turrifiable: T_{<=d}(A);
    anchored_general: T_{<=d}(v, A^[<=2^{D-1}]); anchored_turrifiable: T_{<=d+D}(v, A).
    The witness holds genuine members of the set spanning its span."""
    if isinstance(A, GrowthSet):
        g, base = A.g, A.base
    else:
        base = np.asarray(A)
    D = g.dim
    if check_generating and not generates(g, base):
        raise NotGenerating("the set does not generate the algebra")
    if mode == "general":
        S = bracket_span_levels(g, base, 2 ** (d - 1))
        top = 2 ** (d - 1)
    elif mode == "turrifiable":
        S = tower_span_levels(g, base, d)
        top = d
    elif mode in ("anchored_general", "anchored_turrifiable"):
        if v is None or not np.asarray(v).any():
            raise ValueError("anchored modes need a nonzero anchor")
        if mode == "anchored_general":
            Y = np.vstack(bracket_span_levels(g, base, 2 ** (D - 1)).elements)
            top = d
        else:
            Y = base
            top = d + D
        S = anchored_span_levels(g, v, Y, top)
    else:
        raise ValueError(f"unknown mode {mode}")
    wit = np.vstack(S.elements[: top + 1])
    return Escape(mode, d, wit, S.dim(top), min(d, D))


# fill time and diameter --------------------------------------------------------------------


@dataclass
class FillResult:
    k: int | None
    status: str  # "filled", "not_generating", "budget"
    sizes: list[int]


def fill_time(A: GrowthSet, max_k: int = 64, **budget) -> FillResult:
    g = A.g
    full = full_size(g)
    if not generates(g, A.base):
        return FillResult(None, "not_generating", A.sizes())
    k = 1
    while True:
        grow_layers(A, k, **budget)
        if len(A.layers) < k:
            return FillResult(None, "budget", A.sizes())
        if len(A.layers[k - 1]) == full:
            return FillResult(k, "filled", A.sizes()[:k])
        if k >= max_k:
            return FillResult(None, "budget", A.sizes())
        k += 1


def two_pair_family(g: AlgebraSpec) -> Iterator[np.ndarray]:
    """All symmetric sets {0, ±x, ±y} with x, y nonzero and y ≠ ±x, each once."""
    reps = sign_classes(g)
    for a, b in itertools.combinations(range(len(reps)), 2):
        yield symmetric_closure(g, np.vstack([reps[a], reps[b]]))


def single_pair_family(g: AlgebraSpec) -> Iterator[np.ndarray]:
    for r in sign_classes(g):
        yield symmetric_closure(g, r[None, :])


def sign_classes(g: AlgebraSpec) -> np.ndarray:
    """One representative (the smaller index) of every pair {x, -x}, x ≠ 0."""
    ctx = g.ctx
    if not fits_int64(ctx, g.dim) or ctx.q**g.dim > BITSET_LIMIT:
        raise BudgetExceeded("algebra too large to enumerate")
    allv = decode_many(ctx, g.dim, np.arange(1, ctx.q**g.dim)).reshape(-1, g.dim)
    codes = np.arange(1, ctx.q**g.dim)
    neg = encode_many(ctx, ctx.neg(allv))
    return allv[codes < neg]


def _fill_one(args):
    g, elems, max_k = args
    return fill_time(GrowthSet.from_elements(g, elems), max_k=max_k)


@dataclass
class DiameterReport:
    max_fill: int | None
    argmax: np.ndarray | None
    members: int
    generating: int
    histogram: dict[int, int] = field(default_factory=dict)


def _set_key(ctx, A):
    return tuple(sorted(int(c) for c in encode_many(ctx, A)))


def diameter_lower_bound(g: AlgebraSpec, family: Iterable[np.ndarray], max_k: int = 64, workers: int = 1) -> DiameterReport:
    """Exact maximum fill time over the generating members of a finite family.

    Ties are broken by the lexicographically smallest sorted index tuple,
    so the report does not depend on evaluation order or worker count."""
    sets = [canonical(s) for s in family]
    jobs = [(g, s, max_k) for s in sets]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_fill_one, jobs, chunksize=32))
    else:
        results = [_fill_one(j) for j in jobs]
    best, best_key, best_set = None, None, None
    hist: dict[int, int] = {}
    gen = 0
    for s, r in zip(sets, results):
        if r.status == "budget":
            raise BudgetExceeded("fill time beyond max_k")
        if r.k is None:
            continue
        gen += 1
        hist[r.k] = hist.get(r.k, 0) + 1
        key = _set_key(g.ctx, s)
        if best is None or r.k > best or (r.k == best and key < best_key):
            best, best_key, best_set = r.k, key, s
    return DiameterReport(best, best_set, len(sets), gen, dict(sorted(hist.items())))


def layer_records(A: GrowthSet, with_elements: bool = False) -> list[str]:
    """JSON-lines layer dump, one record per layer."""
    out = []
    for k, L in enumerate(A.layers, 1):
        rec = {"k": k, "size": int(len(L))}
        if with_elements:
            rec["elements"] = L.tolist()
        out.append(json.dumps(rec, sort_keys=True))
    return out
