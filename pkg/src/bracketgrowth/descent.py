"""Dimensional estimates, separating maps and the descent to a line.

Every inequality with a fractional exponent is decided by comparing
integer powers.  Layer indices reported as "measured" are the smallest
layers that actually contain the images in question; the declared cost of
a map (what its generator word guarantees) is kept next to it.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import AlgebraSpec, is_lie, is_simple
from .extremal import ExtremalBasis, build_extremal_basis, generic_many
from .growth import (
    BudgetExceeded,
    GrowthSet,
    NotGenerating,
    anchored_tower_maps,
    full_size,
    generates,
    grow_layers,
    independent_rows,
    tower_span_levels,
)
from .kernel import (
    IncrementalSpan,
    LinearMap,
    PreconditionError,
    Subspace,
    echelon_span,
    fibre,
    image_and_fibre,
    matmul,
    rref,
    whole_space,
)
from . import sumprod


def dimest_k(t: int, D: int, mode: str) -> int:
    if mode == "turrifiable":
        return t * D + 3 * D * (D - 1) // 2
    if mode == "general":
        return t * D + D * (D - 1) * 2 ** (D - 2)
    raise ValueError("mode is 'general' or 'turrifiable'")


def _layer(A: GrowthSet, k: int, budget: dict | None = None) -> np.ndarray:
    if budget and k > len(A.layers):
        grow_layers(A, k, **budget)
        if k > len(A.layers):
            raise BudgetExceeded(A.truncation_note)
    return A.layer(k)


def _count_in(A: GrowthSet, k: int, V: Subspace, budget=None) -> int:
    return int(V.contains_many(_layer(A, k, budget)).sum())


def _require_generating(A: GrowthSet):
    if not generates(A.g, A.base):
        raise NotGenerating("A does not generate the algebra")


# dimensional estimate ---------------------------------------------------------------


@dataclass
class DimestResult:
    holds: bool
    lhs_count: int  # |A^t ∩ V|
    rhs_count: int  # |A^k|
    dim_V: int
    D: int
    t: int
    k_used: int
    verdict: str  # "holds", "implementation fault" or "hypothesis violation: ..."

    @property
    def lhs(self) -> int:
        return self.lhs_count**self.D

    @property
    def rhs(self) -> int:
        return self.rhs_count**self.dim_V


def dimest_check(A: GrowthSet, V: Subspace, t: int = 1, mode: str = "turrifiable", budget: dict | None = None, check_generating: bool = True) -> DimestResult:
    """|A^t ∩ V|^D <= |A^k|^{dim V} with k from the chosen constant."""
    g = A.g
    if check_generating:
        _require_generating(A)
    D = g.dim
    k = dimest_k(t, D, mode)
    lhs = _count_in(A, t, V, budget)
    rhs = len(_layer(A, k, budget))
    ok = lhs**D <= rhs**V.dim
    verdict = "holds"
    if not ok:
        why = []
        if not is_simple(g).simple:
            why.append("algebra not simple")
        if mode == "turrifiable" and not is_lie(g):
            why.append("not verified turrifiable")
        verdict = "hypothesis violation: " + ", ".join(why) if why else "implementation fault"
    return DimestResult(ok, lhs, rhs, V.dim, D, t, k, verdict)


# separating maps -----------------------------------------------------------------


class SeparationError(RuntimeError):
    pass


@dataclass
class Cost:
    """Declared layer bound a*t + b for the image of A^t."""

    a: int
    b: int

    def __call__(self, t: int) -> int:
        return self.a * t + self.b

    def __str__(self):
        return f"{self.a}t+{self.b}"


@dataclass
class SeparatingMap:
    f: LinearMap
    case: str  # "identity", "generic" or "bracketed"
    cost: Cost
    coefficients: list[int] = field(default_factory=list)
    generators: list[list[int]] = field(default_factory=list)  # y_i in the words
    witness: list[int] | None = None  # z for the bracketed case
    scanned: int = 0


def check_char(g: AlgebraSpec, allow_small_char: bool = False):
    p, D = g.ctx.p, g.dim
    if p < 3 * D:
        msg = f"characteristic {p} < 3·dim = {3 * D}"
        if not allow_small_char:
            raise PreconditionError(msg)
        warnings.warn(msg + "; proceeding (exploratory override)", stacklevel=3)


def collinear(ctx, x, y) -> bool:
    return echelon_span(ctx, np.vstack([x, y])).dim < 2


def _spanning_maps(g: AlgebraSpec, x, gens, levels: int):
    """D tower maps T_{<= levels}(x, A) whose values at x form a basis."""
    maps = [f for lvl in anchored_tower_maps(g, x, gens, levels) for f in lvl]
    keep, S = independent_rows(g.ctx, g.dim, [f.value for f in maps])
    if S.dim < g.dim:
        raise SeparationError(f"anchored towers of length <= {levels} span only {S.dim} of {g.dim}")
    return [maps[t] for t in keep]


def _tower_basis(g: AlgebraSpec, gens, levels: int):
    """Basis s_i of the algebra inside T_{<= levels}(A), with weights."""
    L = tower_span_levels(g, gens, levels)
    S = IncrementalSpan(g.ctx, g.dim)
    out = []
    for w, E in enumerate(L.elements):
        for v in E:
            if S.add(v):
                out.append((np.asarray(v), w))
    return out


class GenericSearch:
    """Lexicographically first c in {0..base-1}^n with sum c_l z_l generic.

    Depth-first over coordinates in lex order.  A prefix is abandoned only
    when the affine space prefix + span(z_{j..}) lies entirely inside one
    locus V_i (a hyperplane) or V'_i (a quadric); such a subtree holds no
    generic point, so the answer equals that of the plain lex scan.
    Containment in a quadric is tested on the coefficients of the
    restricted quadratic polynomial, which is exact since q > 2.
    """

    def __init__(self, eb: ExtremalBasis, Z: np.ndarray, base: int):
        g = eb.g
        self.g, self.eb, self.base = g, eb, base
        ctx = g.ctx
        self.Z = Z = np.asarray(Z, dtype=np.int64)
        n = len(Z)
        self.n = n
        B = eb.elements
        self.B = B
        lamZ = matmul(ctx, Z, eb.lam_rows.T)  # (n, #B)
        # lin_tail[j, i]: lambda_i vanishes on z_j, ..., z_{n-1}
        self.lin_tail = np.ones((n + 1, len(B)), dtype=bool)
        for j in range(n - 1, -1, -1):
            self.lin_tail[j] = self.lin_tail[j + 1] & (lamZ[j] == 0)
        self.Az = g.bracket_many(Z, np.repeat(B[0][None, :], n, 0))
        self.Cz = [g.bracket_many(Z, np.repeat(b[None, :], n, 0)) for b in B[1:]]
        self.quad_tail = np.ones((n + 1, len(B) - 1), dtype=bool)
        for i, C in enumerate(self.Cz):
            P = g.bracket_outer(self.Az, C)  # P[l, l'] = [a(z_l), c_i(z_l')]
            S = ctx.add(P, P.transpose(1, 0, 2))
            nz = S.any(axis=2)
            np.fill_diagonal(nz, P[np.arange(n), np.arange(n)].any(axis=1))
            for j in range(n - 1, -1, -1):
                self.quad_tail[j, i] = self.quad_tail[j + 1, i] and not nz[j, j:].any()

    def containing_locus(self, j: int, w) -> str | None:
        """A locus containing w + span(z_j, ..., z_{n-1}), if any."""
        g, ctx, n = self.g, self.g.ctx, self.n
        lam_w = matmul(ctx, self.eb.lam_rows, w)
        hit = np.nonzero((lam_w == 0) & self.lin_tail[j])[0]
        if hit.size:
            return f"V{int(hit[0]) + 1}"
        aw = g.bracket(w, self.B[0])
        m = n - j
        for i, C in enumerate(self.Cz):
            if not self.quad_tail[j, i]:
                continue
            cw = g.bracket(w, self.B[i + 1])
            if g.bracket(aw, cw).any():
                continue
            if m:
                lin = ctx.add(
                    g.bracket_many(np.repeat(aw[None, :], m, 0), C[j:]),
                    g.bracket_many(self.Az[j:], np.repeat(cw[None, :], m, 0)),
                )
                if lin.any():
                    continue
            return f"V'{i + 2}"
        return None

    def first(self) -> list[int] | None:
        ctx = self.g.ctx
        D = self.g.dim
        path: list[int] = []
        ws = [np.zeros(D, dtype=np.int64)]
        nxt = [0]
        while nxt:
            j = len(path)
            c = nxt[-1]
            if c >= self.base:
                nxt.pop()
                ws.pop()
                if path:
                    path.pop()
                    nxt[-1] += 1
                continue
            w = ctx.add(ws[-1], ctx.mul(c, self.Z[j]))
            if self.containing_locus(j + 1, w) is not None:
                nxt[-1] += 1
                continue
            if j + 1 == self.n:
                return path + [c]
            path.append(c)
            ws.append(w)
            nxt.append(0)
        return None

    def root_pattern(self) -> dict:
        out: dict[str, int] = {}
        for c in range(self.base):
            w = self.g.ctx.mul(c, self.Z[0])
            tag = self.containing_locus(1, w) or "none"
            out[tag] = out.get(tag, 0) + 1
        return out

    def lex_rank(self, c: list[int]) -> int:
        r = 0
        for v in c:
            r = r * self.base + int(v)
        return r


def lex_scan_generic(eb: ExtremalBasis, Z: np.ndarray, base: int, limit: int = 10**7) -> list[int] | None:
    """Plain lexicographic scan of the coefficient box; reference for GenericSearch."""
    ctx = eb.g.ctx
    seen = 0
    for C in _lex_chunks(base, len(Z), 4096):
        hit = np.nonzero(generic_many(matmul(ctx, C, Z), eb))[0]
        if hit.size:
            return C[hit[0]].tolist()
        seen += len(C)
        if seen >= limit:
            break
    return None


def _lex_chunks(base: int, D: int, size: int):
    it = itertools.product(range(base), repeat=D)
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.int64)


def find_separating_map(
    x,
    y,
    A: GrowthSet,
    eb: ExtremalBasis,
    allow_small_char: bool = False,
) -> SeparatingMap:
    """A linear homogeneous f with f(x) != 0 and f(y) ∈ K f(x) or [f(x), f(y)] != 0.

    Identity when [x, y] != 0.  Otherwise the anchored-tower basis maps f_j
    (towers of length <= 2D anchored at x) are combined with coefficients
    c_j in 0..3D-2 scanned lexicographically until f_j-combination w = g(x)
    is generic for the extremal basis; then g itself works, or [g(.), z]
    does for some z among s_i, s_i + s_j with s a tower basis.
    """
    g = A.g
    ctx, D = g.ctx, g.dim
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if not x.any() or not y.any():
        raise PreconditionError("x and y must be nonzero")
    if collinear(ctx, x, y):
        raise PreconditionError("y lies on the line through x")
    check_char(g, allow_small_char)
    gens = A.base
    if g.bracket(x, y).any():
        sm = SeparatingMap(LinearMap(ctx, np.eye(D, dtype=np.int64), None, "x"), "identity", Cost(1, 0))
        _post_check(g, sm, x, y)
        return sm
    from .growth import _span_pick

    Yb = _span_pick(g, gens)
    maps = _spanning_maps(g, x, Yb, 2 * D)
    Z = np.array([f.value for f in maps], dtype=np.int64)
    search = GenericSearch(eb, Z, 3 * D - 1)
    found = search.first()
    if found is None:
        raise SeparationError(f"no generic combination in the coefficient box; first-coordinate pattern {search.root_pattern()}")
    found = np.array(found, dtype=np.int64)
    scanned = search.lex_rank(found.tolist()) + 1
    G = np.zeros((D, D), dtype=np.int64)
    terms = []
    a = b = 0
    for c, f in zip(found.tolist(), maps):
        if c:
            G = ctx.add(G, ctx.mul(c, f.matrix))
            terms.append(f"{c}*{f.word}")
            a += c
            b += c * (f.weight - 1)
    word = " + ".join(terms)
    w = matmul(ctx, G, x)
    gy = matmul(ctx, G, y)
    gmap = LinearMap(ctx, G, None, word)
    if not gy.any() or g.bracket(w, gy).any() or collinear(ctx, w, gy):
        sm = SeparatingMap(gmap, "generic", Cost(a, b), found.tolist(), Yb.tolist(), None, scanned)
        _post_check(g, sm, x, y)
        return sm
    basis = _tower_basis(g, Yb, D)
    cands = [(s, ws) for s, ws in basis]
    for (s1, w1), (s2, w2) in itertools.combinations(basis, 2):
        cands.append((ctx.add(s1, s2), w1 + w2))
    for z, wz in cands:
        if g.bracket(g.bracket(w, z), g.bracket(gy, z)).any():
            F = matmul(ctx, g.right_matrix(z), G)
            sm = SeparatingMap(
                LinearMap(ctx, F, None, f"[{word}, z]"), "bracketed", Cost(a, b + wz), found.tolist(), Yb.tolist(), z.tolist(), scanned
            )
            _post_check(g, sm, x, y)
            return sm
    raise SeparationError("generic w found but no z in {s_i, s_i+s_j} separates; contradicts the escape lemma")


def _post_check(g, sm: SeparatingMap, x, y):
    fx, fy = sm.f(x), sm.f(y)
    if not fx.any():
        raise SeparationError("f(x) = 0")
    if not (collinear(g.ctx, fx, fy) or g.bracket(fx, fy).any()):
        raise SeparationError("f(y) off the line K f(x) yet [f(x), f(y)] = 0")


# descent step ---------------------------------------------------------------------


@dataclass
class DescentStep:
    branch: str  # "trivial", "span-degenerate", "separating"
    V: Subspace
    W: Subspace
    t: int
    m: int  # measured: least layer holding f(A^t ∩ V)
    m_declared: int
    k: int
    lhs: int  # |A^t ∩ V|
    image_count: int  # |A^m ∩ W|
    fibre_count: int  # |A^t ∩ Y|, Y the fullest fibre
    big: int  # |A^k|
    holds: bool
    fibre_holds: bool
    f: LinearMap | None = None
    separating: str | None = None
    pair: tuple | None = None

    def digest(self) -> dict:
        return {
            "branch": self.branch,
            "separating": self.separating,
            "dim_V": self.V.dim,
            "dim_W": self.W.dim,
            "W": self.W.rows.tolist(),
            "t": self.t,
            "m": self.m,
            "m_declared": self.m_declared,
            "k": self.k,
            "lhs": self.lhs,
            "image_count": self.image_count,
            "fibre_count": self.fibre_count,
            "big": self.big,
            "holds": self.holds,
            "word": self.f.word if self.f is not None else None,
        }


def _lex_key(row) -> tuple:
    return tuple(int(c) for c in row)


def _projection(ctx, D: int, keep: Subspace, V: Subspace) -> np.ndarray:
    """Matrix fixing keep pointwise and killing a complement of keep in V and of V in g."""
    S = IncrementalSpan(ctx, D)
    basis, target = [], []
    for r in keep.rows:
        S.add(r)
        basis.append(r)
        target.append(r)
    for r in list(V.rows) + list(np.eye(D, dtype=np.int64)):
        if S.add(r):
            basis.append(r)
            target.append(np.zeros(D, dtype=np.int64))
    B = np.array(basis, dtype=np.int64)
    T = np.array(target, dtype=np.int64)
    R, piv = rref(ctx, np.hstack([B, T]))
    # B M^T = T  =>  M^T = B^{-1} T
    return R[:, D:].T.copy()


def _least_layer(A: GrowthSet, pts: np.ndarray, upto: int, budget=None) -> int:
    for m in range(1, upto + 1):
        _layer(A, m, budget)
        if A.contains_many(m, pts).all():
            return m
    raise PreconditionError(f"images escape the declared layer {upto}")


def descent_step(
    V: Subspace,
    A: GrowthSet,
    t: int,
    eb: ExtremalBasis,
    allow_small_char: bool = False,
    budget: dict | None = None,
) -> DescentStep:
    """Replace V by W with 0 < dim W < dim V, recording the counting inequality."""
    g = A.g
    ctx, D = g.ctx, g.dim
    if V.dim <= 1:
        raise PreconditionError("dim V must exceed 1")
    if not V.is_linear:
        raise PreconditionError("V must be a linear subspace")
    check_char(g, allow_small_char)
    k = dimest_k(t, D, "turrifiable")
    L = _layer(A, t, budget)
    S = L[V.contains_many(L)]
    lhs = len(S)
    big = len(_layer(A, k, budget))
    d = V.dim
    if not S[S.any(axis=1)].size:
        W = echelon_span(ctx, V.rows[:1], ambient=D)
        img = _count_in(A, t, W, budget)
        holds = lhs**D <= img**D * big ** (d - 1)
        return DescentStep("trivial", V, W, t, t, t, k, lhs, img, 1, big, holds, True)
    span = echelon_span(ctx, S, ambient=D)
    if span.dim < d:
        W = span
        M = _projection(ctx, D, W, V)
        f = LinearMap(ctx, M, None, "projection onto span(A^t ∩ V)")
        img = _count_in(A, t, W, budget)
        holds = lhs**D <= img**D * big ** (d - W.dim)
        return DescentStep("span-degenerate", V, W, t, t, t, k, lhs, img, 1, big, holds, True, f)
    nz = sorted((r for r in S if r.any()), key=_lex_key)
    x = nz[0]
    y = next(r for r in nz[1:] if not collinear(ctx, x, r))
    sm = find_separating_map(x, y, A, eb, allow_small_char=allow_small_char)
    f1 = sm.f
    fx, fy = f1(x), f1(y)
    if collinear(ctx, fx, fy):
        f, declared, tag = f1, sm.cost(t), sm.case
    else:
        M = matmul(ctx, g.left_matrix(fx), f1.matrix)
        f = LinearMap(ctx, M, None, f"[f1(x), f1(.)] with f1 = {f1.word}")
        declared, tag = 2 * sm.cost(t), sm.case + "+bracket"
    W, _ = image_and_fibre(f, V)
    if not 0 < W.dim < d:
        raise SeparationError(f"image has dimension {W.dim}, expected strictly between 0 and {d}")
    FS = f.apply_many(S)
    m = _least_layer(A, FS, max(declared, 1), budget)
    img = _count_in(A, m, W, budget)
    # fullest fibre of f on V among points of A^t ∩ V
    vals, counts = np.unique(FS, axis=0, return_counts=True)
    best = int(np.argmax(counts))
    Y = fibre(f, V, vals[best])
    fib = int(counts[best])
    if Y.dim != d - W.dim or _count_in(A, t, Y, budget) != fib:
        raise SeparationError("fibre bookkeeping mismatch")
    holds = lhs**D <= img**D * big ** (d - W.dim) and lhs <= img * fib
    fib_holds = fib**D <= big ** Y.dim
    return DescentStep("separating", V, W, t, m, declared, k, lhs, img, fib, big, holds, fib_holds, f, tag, (x.tolist(), y.tolist()))


# one-dimensional endpoint ------------------------------------------------------------


@dataclass
class ExperimentConfig:
    epsilon: Fraction = Fraction(1, 10)
    delta: Fraction = Fraction(1)
    m: int = 1
    max_layer_elements: int | None = 50_000_000
    max_pairs: int | None = 2_000_000_000
    max_k: int = 4096
    seed: int | None = None
    allow_small_char: bool = False

    def __post_init__(self):
        self.epsilon = Fraction(self.epsilon)
        self.delta = Fraction(self.delta)
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        for name in ("max_layer_elements", "max_pairs", "max_k"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def budget(self) -> dict:
        return {"max_elements": self.max_layer_elements, "max_pairs": self.max_pairs}

    def to_json(self) -> dict:
        d = asdict(self)
        d["epsilon"] = str(self.epsilon)
        d["delta"] = str(self.delta)
        return d

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        known = {k: v for k, v in obj.items() if k in cls.__dataclass_fields__}
        for k in ("epsilon", "delta"):
            if k in known:
                known[k] = Fraction(str(known[k]))
        return cls(**known)


@dataclass
class DescentTrace:
    steps: list[DescentStep] = field(default_factory=list)

    def digest(self) -> list[dict]:
        return [s.digest() for s in self.steps]

    def sha256(self) -> str:
        return hashlib.sha256(json.dumps(self.digest(), sort_keys=True).encode()).hexdigest()

    def valid(self, D: int) -> bool:
        dims = [D] + [s.W.dim for s in self.steps]
        return all(a > b > 0 for a, b in zip(dims, dims[1:])) and len(self.steps) <= D - 1


@dataclass
class OneDimResult:
    outcome: str  # "growth", "line" or "inconclusive"
    k: int | None
    size_A: int
    size_k: int | None
    line: Subspace | None
    line_count: int | None
    epsilon: Fraction
    trace: DescentTrace
    note: str = ""

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "k": self.k,
            "size_A": self.size_A,
            "size_k": self.size_k,
            "line": None if self.line is None else self.line.rows.tolist(),
            "line_count": self.line_count,
            "epsilon": str(self.epsilon),
            "trace": self.trace.digest(),
            "note": self.note,
        }


def growth_certified(size_A: int, size_k: int, eps: Fraction) -> bool:
    """|A^k| > |A|^{1+eps}."""
    return size_k**eps.denominator > size_A ** (eps.denominator + eps.numerator)


def line_certified(size_A: int, line_count: int, D: int, eps: Fraction) -> bool:
    """|A^k ∩ V| > |A|^{1/D - eps}, compared as integer powers."""
    e = eps.denominator - D * eps.numerator
    if e < 0:
        # right side below 1 (|A| >= 2) while the line holds 0
        return line_count >= 1 and size_A >= 2
    return line_count ** (D * eps.denominator) > size_A**e


def onedim_pipeline(A: GrowthSet, cfg: ExperimentConfig, eb: ExtremalBasis | None = None) -> OneDimResult:
    """Descend from the whole algebra to a line, then read off growth or a dense line."""
    g = A.g
    D = g.dim
    _require_generating(A)
    check_char(g, cfg.allow_small_char)
    eb = eb or build_extremal_basis(g)
    trace = DescentTrace()
    V = whole_space(g.ctx, D)
    t = 1
    ks = []
    try:
        while V.dim > 1:
            step = descent_step(V, A, t, eb, cfg.allow_small_char, cfg.budget)
            if not step.holds:
                raise AssertionError(f"descent inequality fails at step {len(trace.steps) + 1}")
            trace.steps.append(step)
            ks.append(step.k)
            V, t = step.W, step.m
            if max(ks + [t]) > cfg.max_k:
                raise BudgetExceeded(f"layer index {max(ks + [t])} beyond max_k")
        k = max(ks + [t])
        size_A = len(A.base)
        size_k = len(_layer(A, k, cfg.budget))
        cnt = _count_in(A, k, V, cfg.budget)
    except BudgetExceeded as e:
        return OneDimResult("inconclusive", None, len(A.base), None, None, None, cfg.epsilon, trace, str(e))
    if growth_certified(size_A, size_k, cfg.epsilon):
        return OneDimResult("growth", k, size_A, size_k, None, None, cfg.epsilon, trace)
    if line_certified(size_A, cnt, D, cfg.epsilon):
        return OneDimResult("line", k, size_A, size_k, V, cnt, cfg.epsilon, trace)
    raise AssertionError("neither growth nor a dense line: the descent chain is inconsistent")


def reverify(g: AlgebraSpec, elements, res: OneDimResult) -> bool:
    """Recount a certificate from scratch with the other set representation."""
    if res.outcome == "inconclusive":
        return True
    if not res.trace.valid(g.dim):
        return False
    fresh = GrowthSet.from_elements(g, elements)
    rep = "hash" if fresh.representation == "bitset" else "bitset"
    fresh = GrowthSet.from_elements(g, elements, representation=rep)
    size_A = len(fresh.base)
    size_k = fresh.size(res.k)
    if size_A != res.size_A or size_k != res.size_k:
        return False
    for s in res.trace.steps:
        if s.f is not None and s.branch == "separating":
            L = fresh.layer(s.t)
            pts = s.f.apply_many(L[s.V.contains_many(L)])
            if not fresh.contains_many(s.m, pts).all():
                return False
        cnt = _count_in(fresh, s.t, s.V)
        img = _count_in(fresh, s.m, s.W)
        big = fresh.size(s.k)
        if (cnt, img, big) != (s.lhs, s.image_count, s.big):
            return False
        if not cnt**g.dim <= img**g.dim * big ** (s.V.dim - s.W.dim):
            return False
    if res.outcome == "growth":
        return growth_certified(size_A, size_k, res.epsilon)
    cnt = _count_in(fresh, res.k, res.line)
    return cnt == res.line_count and res.line.dim == 1 and line_certified(size_A, cnt, g.dim, res.epsilon)


# the sum-bracket experiment ----------------------------------------------------------


def _scalar_set(A: GrowthSet, k: int, v, budget=None) -> sumprod.ScalarSet:
    """{x in K : x v in A^k}."""
    ctx = A.g.ctx
    xs = np.arange(ctx.q)
    pts = ctx.mul(xs[:, None], np.asarray(v)[None, :])
    _layer(A, k, budget)
    return sumprod.ScalarSet(ctx, A.contains_many(k, pts))


def _check_scaled(A: GrowthSet, level: int, S: sumprod.ScalarSet, z, budget=None) -> bool:
    ctx = A.g.ctx
    pts = ctx.mul(S.elements[:, None], np.asarray(z)[None, :])
    _layer(A, level, budget)
    return bool(A.contains_many(level, pts).all())


def sum_bracket_experiment(A: GrowthSet, cfg: ExperimentConfig, case: str, eb: ExtremalBasis | None = None, sample_limit: int = 2_000_000) -> dict:
    """Run the line-to-whole-algebra construction with measured layer indices.

    Every containment used by the construction is checked by membership;
    the report lists the layer index at which each was confirmed.
    """
    if case not in ("i_ii", "iii", "iv"):
        raise ValueError("case is one of i_ii, iii, iv")
    g = A.g
    ctx, D = g.ctx, g.dim
    full = full_size(g)
    rep: dict = {"case": case, "seed": cfg.seed, "size_A": len(A.base), "checks": {}}
    if len(A.base) == full:
        rep.update(outcome="covered", k_measured=1, sizes=[full], covered=True)
        return rep
    res = onedim_pipeline(A, cfg, eb)
    rep["trace"] = res.trace.digest()
    rep["onedim"] = {"outcome": res.outcome, "k": res.k, "size_k": res.size_k, "line_count": res.line_count}
    if res.outcome != "line":
        rep.update(outcome=res.outcome, k_measured=res.k, sizes=A.sizes(), covered=A.sizes()[-1] == full)
        return rep
    k = res.k
    Lk = _layer(A, k, cfg.budget)
    onl = Lk[res.line.contains_many(Lk)]
    v = sorted((r for r in onl if r.any()), key=_lex_key)[0]
    X = _scalar_set(A, k, v, cfg.budget)
    from .growth import _span_pick

    Yb = _span_pick(g, A.base)
    fw = next(f for lvl in anchored_tower_maps(g, v, Yb, 2 * D) for f in lvl if g.bracket(v, f.value).any())
    w = fw.value
    vw = g.bracket(v, w)
    XX = sumprod.setops(X, X, "product")
    XpX = sumprod.setops(X, X, "sum")
    lvl_vw = 2 * k + fw.weight - 1
    rep["checks"]["XX[v,w]"] = {"level": lvl_vw, "ok": _check_scaled(A, lvl_vw, XX, vw, cfg.budget)}
    rep["checks"]["(X+X)v"] = {"level": 2 * k, "ok": _check_scaled(A, 2 * k, XpX, v, cfg.budget)}
    rep.update(size_X=len(X), size_XX=len(XX), size_XpX=len(XpX), tower_weight=fw.weight)
    if case == "iii" and len(XpX) >= len(XX):
        z, kp, S, label = v, 2 * k, XpX, "X+X"
    else:
        z, kp = vw, lvl_vw
        if case == "i_ii":
            S, label, kpp = sumprod.evaluate(X, "XX+XX+XX"), "XX+XX+XX", 3 * kp
        elif case == "iii":
            S, label = XX, "XX"
        else:
            S, label, kpp = sumprod.iterated_sum(XX, 3 * cfg.m), f"{3 * cfg.m}XX", 3 * cfg.m * kp
    if case == "iii":
        kpp = kp
        rep["dichotomy"] = sumprod.dichotomy_report(X, cfg.delta).to_json()
    if case == "i_ii":
        gr = sumprod.growth_ratio(X)
        rep["growth_ratio"] = {"size": gr.size, "exponent": gr.exponent}
    if case == "iv":
        cov = sumprod.covering_check(X, 3 * cfg.m)
        rep["covering"] = {"covers": cov.covers, "hypothesis_met": cov.hypothesis_met, "flag": cov.flag}
    rep["checks"][f"({label})z"] = {"level": kpp, "ok": _check_scaled(A, kpp, S, z, cfg.budget)}
    Y = _scalar_set(A, kpp, z, cfg.budget)
    maps = _spanning_maps(g, z, Yb, 2 * D)
    final = D * (kpp + 2 * D - 1)
    Zi = np.array([f.value for f in maps], dtype=np.int64)
    ok = True
    for f in maps:
        lvl = kpp + f.weight - 1
        ok &= _check_scaled(A, lvl, Y, f.value, cfg.budget)
    rep["checks"]["Y z_i"] = {"level": kpp + 2 * D - 1, "ok": bool(ok)}
    ys = Y.elements
    n = len(ys) ** D
    rng = np.random.default_rng(cfg.seed)
    if n <= sample_limit:
        C = np.array(list(itertools.product(ys.tolist(), repeat=D)), dtype=np.int64)
        mode = "exhaustive"
    else:
        C = ys[rng.integers(0, len(ys), size=(sample_limit, D))]
        mode = "sampled"
    pts = matmul(ctx, C, Zi)
    _layer(A, final, cfg.budget)
    rep["checks"]["direct sum"] = {"level": final, "ok": bool(A.contains_many(final, pts).all()), "mode": mode, "points": len(C)}
    size_final = A.size(final)
    sizes = A.sizes()
    fill = next((i + 1 for i, s in enumerate(sizes) if s == full), None)
    rep.update(
        outcome="line",
        size_Y=len(Y),
        product_bound=n,
        final_level=final,
        size_final=size_final,
        k_measured=final,
        covered=size_final == full,
        fill_time=fill,
        sizes=sizes[: fill or len(sizes)],
    )
    rep["all_checks_ok"] = all(c["ok"] for c in rep["checks"].values())
    return rep
