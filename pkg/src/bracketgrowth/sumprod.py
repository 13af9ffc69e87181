"""Sum and product sets of scalars in a finite field.

Sets are boolean masks over field indices.  The exactly checkable facts
(covering of F_q^* by iterated sums of XX above the size threshold, and
Cauchy-Davenport over Z/pZ) are assertions; quantities governed by
unspecified constants are only measured.
"""
from __future__ import annotations

import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable

import numpy as np

from .kernel import FieldCtx, field_of_order, subfield_lattice


class FieldMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ScalarSet:
    ctx: FieldCtx
    mask: np.ndarray  # bool, length q

    @classmethod
    def of(cls, ctx: FieldCtx, elements: Iterable[int]) -> "ScalarSet":
        m = np.zeros(ctx.q, dtype=bool)
        idx = np.asarray(list(elements), dtype=np.int64)
        if idx.size:
            if idx.min() < 0 or idx.max() >= ctx.q:
                raise ValueError("element index outside the field")
            m[idx] = True
        return cls(ctx, m)

    @classmethod
    def whole(cls, ctx: FieldCtx) -> "ScalarSet":
        return cls(ctx, np.ones(ctx.q, dtype=bool))

    @property
    def elements(self) -> np.ndarray:
        return np.nonzero(self.mask)[0]

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __contains__(self, a) -> bool:
        return bool(self.mask[int(a)])

    def __eq__(self, other) -> bool:
        return isinstance(other, ScalarSet) and self.ctx == other.ctx and bool((self.mask == other.mask).all())

    def __repr__(self):
        return f"ScalarSet(q={self.ctx.q}, {self.elements.tolist()})"

    def issubset(self, other: "ScalarSet") -> bool:
        return not bool((self.mask & ~other.mask).any())

    def to_json(self) -> dict:
        return {"field": self.ctx.to_json(), "elements": self.elements.tolist()}


def _check(X: ScalarSet, Y: ScalarSet):
    if X.ctx != Y.ctx:
        raise FieldMismatch("scalar sets live in different fields")


_OPS = {"sum": "add", "product": "mul", "difference": "sub"}


def setops(X: ScalarSet, Y: ScalarSet, op: str) -> ScalarSet:
    """{x o y : x in X, y in Y} for o in {sum, product, difference}."""
    _check(X, Y)
    if op not in _OPS:
        raise ValueError(f"op must be one of {sorted(_OPS)}")
    a, b = X.elements, Y.elements
    out = np.zeros(X.ctx.q, dtype=bool)
    if a.size and b.size:
        out[getattr(X.ctx, _OPS[op])(a[:, None], b[None, :]).ravel()] = True
    return ScalarSet(X.ctx, out)


def iterated_sum(X: ScalarSet, d: int) -> ScalarSet:
    """dX = X + ... + X (d copies), d >= 1."""
    if d < 1:
        raise ValueError("d >= 1")
    out = X
    for _ in range(d - 1):
        out = setops(out, X, "sum")
    return out


_TERM = re.compile(r"^(\d*)(X+)$")


def evaluate(X: ScalarSet, expr: str) -> ScalarSet:
    """Evaluate a sum of products such as "XX+XX+XX", "X+X" or "3XX".

    A term is a run of X's (that many-fold product set), optionally
    prefixed by a count meaning that many copies summed.
    """
    terms = [t.strip() for t in expr.replace(" ", "").split("+")]
    total = None
    for t in terms:
        m = _TERM.match(t)
        if not m:
            raise ValueError(f"cannot parse term {t!r} in {expr!r}")
        prod = X
        for _ in range(len(m.group(2)) - 1):
            prod = setops(prod, X, "product")
        term = iterated_sum(prod, int(m.group(1) or 1))
        total = term if total is None else setops(total, term, "sum")
    return total


@dataclass
class GrowthRatio:
    expr: str
    base: int
    size: int
    exponent: float | None  # log|expr(X)| / log|X|; a measurement, not a verdict
    saturated: bool


def growth_ratio(X: ScalarSet, expr: str = "XX+XX+XX") -> GrowthRatio:
    S = evaluate(X, expr)
    n, s = len(X), len(S)
    exp = math.log(s) / math.log(n) if n >= 2 and s >= 1 else None
    return GrowthRatio(expr, n, s, exp, s == X.ctx.q)


# covering ---------------------------------------------------------------------------


def covering_threshold_met(q: int, size: int, d: int) -> bool:
    """|X| > q^{(1+1/d)/2}, compared as |X|^{2d} > q^{d+1}."""
    return size ** (2 * d) > q ** (d + 1)


def threshold_size(q: int, d: int) -> int:
    n = 1
    while not covering_threshold_met(q, n, d):
        n += 1
    return n


@dataclass
class CoveringResult:
    covers: bool
    missing: int | None
    hypothesis_met: bool
    flag: str  # "" or "hypothesis unmet"
    sumset_size: int

    @property
    def fault(self) -> bool:
        return self.hypothesis_met and not self.covers


def covering_check(X: ScalarSet, d: int) -> CoveringResult:
    """Does the d-fold sum of XX contain every nonzero field element?"""
    ctx = X.ctx
    met = ctx.p != 2 and covering_threshold_met(ctx.q, len(X), d)
    S = iterated_sum(setops(X, X, "product"), d) if len(X) else X
    miss = np.nonzero(~S.mask[1:])[0]
    missing = int(miss[0]) + 1 if miss.size else None
    return CoveringResult(missing is None, missing, met, "" if met else "hypothesis unmet", len(S))


def _covering_row(args):
    q, d, elems, tag = args
    ctx = field_of_order(q)
    r = covering_check(ScalarSet.of(ctx, elems), d)
    verdict = "covers" if r.covers else ("FAULT" if r.fault else "misses")
    return {"q": q, "d": d, "size": len(elems), "sumset": r.sumset_size, "verdict": verdict, "flag": r.flag, "seed": tag}


def covering_sweep(q: int, d: int, instances: int = 1000, seed: int = 0, size: int | None = None, workers: int = 1) -> list[dict]:
    """Covering check on subsets of GF(q) of the threshold size.

    Exhaustive over all subsets when there are at most `instances` of them,
    otherwise `instances` seeded random subsets.
    """
    n = size if size is not None else threshold_size(q, d)
    if math.comb(q, n) <= instances:
        subsets = [list(c) for c in combinations(range(q), n)]
        tag = "exhaustive"
    else:
        rng = np.random.default_rng(seed)
        subsets = [sorted(rng.choice(q, size=n, replace=False).tolist()) for _ in range(instances)]
        tag = seed
    jobs = [(q, d, s, tag) for s in subsets]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_covering_row, jobs, chunksize=64))
    return [_covering_row(j) for j in jobs]


# Cauchy-Davenport -------------------------------------------------------------------


@dataclass
class CDResult:
    holds: bool
    sumset: int
    bound: int


def cauchy_davenport_check(X: ScalarSet, Y: ScalarSet) -> CDResult:
    _check(X, Y)
    if X.ctx.k != 1:
        raise ValueError("Cauchy-Davenport is stated for prime fields only")
    if not len(X) or not len(Y):
        raise ValueError("sets must be nonempty")
    p = X.ctx.p
    s = len(setops(X, Y, "sum"))
    bound = min(p, len(X) + len(Y) - 1)
    return CDResult(s >= bound, s, bound)


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.uint64)
    c = np.zeros(a.shape, dtype=np.int64)
    while a.any():
        c += (a & np.uint64(1)).astype(np.int64)
        a = a >> np.uint64(1)
    return c


def cauchy_davenport_exhaustive(p: int) -> dict:
    """Check every pair of nonempty subsets of Z/pZ (subsets as bitmasks)."""
    if p > 13:
        raise ValueError("exhaustive mode is limited to p <= 13")
    full = (1 << p) - 1
    n = 1 << p
    pc = _popcount(np.arange(n))
    checked = bad = 0
    first_bad = None
    for xm in range(1, n):
        # rot[b] = X + b as a mask
        rot = [((xm << b) | (xm >> (p - b))) & full for b in range(p)]
        sums = np.zeros(n, dtype=np.int64)
        for b in range(p):
            sums[1 << b : 1 << (b + 1)] = sums[: 1 << b] | rot[b]
        s = pc[sums][1:]
        need = np.minimum(p, pc[xm] + pc[1:] - 1)
        fail = np.nonzero(s < need)[0]
        checked += n - 1
        if fail.size:
            bad += int(fail.size)
            if first_bad is None:
                first_bad = (xm, int(fail[0]) + 1)
    return {"p": p, "pairs": checked, "violations": bad, "first_violation": first_bad}


# subfields and the sum-product dichotomy ---------------------------------------------


def _pow(ctx: FieldCtx, a, e: int):
    a = np.asarray(a, dtype=np.int64)
    out = np.ones_like(a)
    while e:
        if e & 1:
            out = ctx.mul(out, a)
        a = ctx.mul(a, a)
        e >>= 1
    return out


def subfield_elements(ctx: FieldCtx, size: int) -> np.ndarray:
    """The subfield of the given order as {a : a^size = a}."""
    if size not in subfield_lattice(ctx):
        raise ValueError(f"GF({ctx.q}) has no subfield of order {size}")
    a = np.arange(ctx.q)
    return a[_pow(ctx, a, size) == a]


def subfield_coset(X: ScalarSet, size: int) -> int | None:
    """Some c != 0 with X ⊆ c·K' (|K'| = size), or None.

    If X ⊆ cK' and x0 is a nonzero member of X then x0 K' = c K', so it
    suffices to test x0^{-1} X ⊆ K' by the Frobenius criterion a^{|K'|} = a.
    """
    ctx = X.ctx
    nz = X.elements[X.elements != 0]
    if nz.size == 0:
        return 1
    x0 = int(nz[0])
    Y = ctx.mul(int(ctx.inv(x0)), X.elements)
    if bool((_pow(ctx, Y, size) == Y).all()):
        return x0
    return None


def subfield_coset_bruteforce(X: ScalarSet, size: int) -> int | None:
    """Same decision by trying every scalar c; for cross-checking."""
    ctx = X.ctx
    Kp = subfield_elements(ctx, size)
    for c in range(1, ctx.q):
        coset = np.zeros(ctx.q, dtype=bool)
        coset[ctx.mul(c, Kp)] = True
        if not (X.mask & ~coset).any():
            return c
    return None


@dataclass
class DichotomyReport:
    size: int
    sum_size: int
    product_size: int
    growth_exponent_met: bool  # max(|X+X|, |XX|) >= |X|^{1+eps}, exact
    epsilon: Fraction
    subfields: list[int]
    below: int | None  # largest subfield order <= |X|
    above: int | None  # smallest subfield order >= |X|
    cosets: dict = field(default_factory=dict)  # subfield order -> scalar c with X ⊆ cK'
    flags: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["epsilon"] = str(self.epsilon)
        return d


def dichotomy_report(X: ScalarSet, eps) -> DichotomyReport:
    eps = Fraction(eps)
    ctx = X.ctx
    n = len(X)
    s = len(setops(X, X, "sum"))
    pr = len(setops(X, X, "product"))
    big = max(s, pr)
    met = n > 0 and big**eps.denominator >= n ** (eps.denominator + eps.numerator)
    subs = subfield_lattice(ctx)
    below = max((k for k in subs if k <= n), default=None)
    above = min((k for k in subs if k >= n), default=None)
    cosets = {}
    flags = []
    for k in subs[:-1]:  # proper subfields only
        c = subfield_coset(X, k) if n else None
        if c is not None:
            cosets[k] = c
    if cosets:
        k0 = min(cosets)
        flags.append(f"contained in a coset of the subfield of order {k0}")
        Kp = ScalarSet.of(ctx, subfield_elements(ctx, k0))
        if X == Kp:
            flags.append("is a subfield")
    if n == ctx.q:
        flags.append("saturated")
    elif s == ctx.q and pr == ctx.q:
        flags.append("sum and product sets saturated")
    return DichotomyReport(n, s, pr, met, eps, subs, below, above, cosets, flags)


# measurement sweeps -------------------------------------------------------------------


def growth_ratio_stats(p: int = 101, size: int = 10, instances: int = 1000, seed: int = 0, expr: str = "XX+XX+XX") -> dict:
    """Size distribution of expr(X) over seeded random X ⊆ GF(p) of fixed size."""
    ctx = field_of_order(p)
    rng = np.random.default_rng(seed)
    sizes = []
    for _ in range(instances):
        X = ScalarSet.of(ctx, rng.choice(p, size=size, replace=False))
        sizes.append(len(evaluate(X, expr)))
    arr = np.array(sizes)
    hist = {int(v): int(c) for v, c in zip(*np.unique(arr, return_counts=True))}
    return {
        "p": p,
        "size": size,
        "instances": instances,
        "seed": seed,
        "expr": expr,
        "min": int(arr.min()),
        "max": int(arr.max()),
        "sum": int(arr.sum()),
        "histogram": hist,
    }
