"""Seeded trial generators and per-trial runners shared by the CLI and the tests.

Trial i of a run with seed s draws from its own child of SeedSequence(s),
so a trial's input does not depend on how many trials run or on which
worker runs it.  Records are plain dicts ready for JSON-lines output.
"""
from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from typing import Callable

import numpy as np

from .algebra import AlgebraSpec
from .descent import (
    ExperimentConfig,
    dimest_check,
    onedim_pipeline,
    reverify,
    sum_bracket_experiment,
)
from .extremal import build_extremal_basis
from .growth import (
    BudgetExceeded,
    GrowthSet,
    anchored_span_levels,
    generates,
    olson_dichotomy,
    symmetric_closure,
    tower_span_levels,
)
from .kernel import affine_span, echelon_span


def trial_rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def random_generating_set(g: AlgebraSpec, rng: np.random.Generator, gens: tuple[int, int] = (2, 4)) -> np.ndarray:
    """Symmetric closure of 2..4 uniform random elements, redrawn until it generates."""
    while True:
        n = int(rng.integers(gens[0], gens[1] + 1))
        X = rng.integers(0, g.ctx.q, size=(n, g.dim))
        if generates(g, X):
            return symmetric_closure(g, X)


def random_symmetric_set(g: AlgebraSpec, rng: np.random.Generator, max_size: int = 7) -> np.ndarray:
    """A symmetric set with at most max_size elements (max_size odd works best)."""
    pairs = int(rng.integers(0, (max_size - 1) // 2 + 1))
    X = rng.integers(0, g.ctx.q, size=(pairs, g.dim)) if pairs else np.zeros((0, g.dim), dtype=np.int64)
    S = symmetric_closure(g, X)
    while len(S) > max_size:  # a drawn pair may collide with another's negative; drop and retry
        X = X[:-1]
        S = symmetric_closure(g, X)
    return S


def random_large_set(g: AlgebraSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """A symmetric generating set with at least `size` elements."""
    while True:
        X = rng.integers(0, g.ctx.q, size=((size + 1) // 2, g.dim))
        S = symmetric_closure(g, X)
        while len(S) < size:
            S = symmetric_closure(g, np.vstack([S, rng.integers(0, g.ctx.q, size=(1, g.dim))]))
        if generates(g, S):
            return S


def _draw(g, rng, set_size):
    return random_generating_set(g, rng) if set_size is None else random_large_set(g, rng, set_size)


def random_subspace(g: AlgebraSpec, rng: np.random.Generator, d: int, affine: bool = True):
    ctx, D = g.ctx, g.dim
    while True:
        rows = rng.integers(0, ctx.q, size=(d, D))
        lin = echelon_span(ctx, rows, ambient=D) if d else echelon_span(ctx, [], ambient=D)
        if lin.dim == d:
            break
    if affine:
        return affine_span(ctx, rng.integers(0, ctx.q, size=D), lin.rows)
    return lin


# per-trial runners: (algebra json, config json, trial index, rng) -> record ------------


def _dimest_trial(g, cfg, i, rng, t=1):
    A = GrowthSet.from_elements(g, random_generating_set(g, rng))
    d = int(rng.integers(0, g.dim + 1))
    # anchor V at a point of A so the left-hand count is never trivially zero
    V = random_subspace(g, rng, d, affine=False)
    V = affine_span(g.ctx, A.base[int(rng.integers(len(A.base)))], V.rows, ambient=g.dim)
    r = dimest_check(A, V, t, "turrifiable", budget=cfg.budget)
    return {"trial": i, "size_A": len(A.base), "dim_V": d, "t": t, "k": r.k_used, "lhs_count": r.lhs_count, "rhs_count": r.rhs_count, "verdict": r.verdict}


def _onedim_trial(g, cfg, i, rng, set_size=None):
    elems = _draw(g, rng, set_size)
    A = GrowthSet.from_elements(g, elems)
    r = onedim_pipeline(A, cfg, _eb(g))
    ok = reverify(g, elems, r)
    rec = r.to_json()
    rec.update(trial=i, reverified=ok, steps=len(r.trace.steps), trace_valid=r.trace.valid(g.dim), trace_sha256=r.trace.sha256())
    rec.pop("trace")
    return rec


def _sum_bracket_trial(g, cfg, i, rng, case, set_size=None):
    A = GrowthSet.from_elements(g, _draw(g, rng, set_size))
    rep = sum_bracket_experiment(A, cfg, case, _eb(g))
    rep["trial"] = i
    rep.pop("trace", None)
    return rep


def _olson_trial(g, cfg, i, rng, max_size=7):
    A = GrowthSet.from_elements(g, random_symmetric_set(g, rng, max_size))
    out = {"trial": i, "size_A": len(A.base)}
    for k in (1, 2):
        r = olson_dichotomy(A, k, **cfg.budget)
        out[f"k{k}"] = {"horn": r.horn, "size_k": r.size_k, "size_4k": r.size_4k, "size_6k": r.size_6k, "closure": r.closure}
    out["holds"] = all(out[f"k{k}"]["horn"] != "neither" for k in (1, 2))
    # layers with |X^j| < j: an observation only, nothing is asserted about it
    out["short_layers"] = [j for j, n in enumerate(A.sizes(), 1) if n < j]
    return out


def _escape_trial(g, cfg, i, rng, anchors=4):
    """Span dimensions of T_{<=d}(A) and T_{<=d+D}(v, A) for every d <= D.

    The levels are cumulative, so one enumeration up to the largest d
    serves every smaller d as well."""
    elems = random_generating_set(g, rng)
    D = g.dim
    fails = []
    towers = tower_span_levels(g, elems, D)
    dims = [towers.dim(d) for d in range(1, D + 1)]
    fails += [("towers", d) for d in range(1, D + 1) if dims[d - 1] < d]
    anchored = []
    for _ in range(anchors):
        v = rng.integers(0, g.ctx.q, size=D)
        while not v.any():
            v = rng.integers(0, g.ctx.q, size=D)
        S = anchored_span_levels(g, v, elems, 2 * D)
        adims = [S.dim(d + D) for d in range(1, D + 1)]
        anchored.append(adims)
        fails += [("anchored", d, v.tolist()) for d in range(1, D + 1) if adims[d - 1] < d]
    return {"trial": i, "size_A": len(elems), "anchors": anchors, "tower_dims": dims, "anchored_dims": anchored, "holds": not fails, "failures": fails}


_EB_CACHE: dict = {}


def _eb(g: AlgebraSpec):
    key = g.dumps()
    if key not in _EB_CACHE:
        _EB_CACHE[key] = build_extremal_basis(g)
    return _EB_CACHE[key]


RUNNERS: dict[str, Callable] = {
    "dimest": _dimest_trial,
    "onedim": _onedim_trial,
    "olson": _olson_trial,
    "escape": _escape_trial,
    "i_ii": functools.partial(_sum_bracket_trial, case="i_ii"),
    "iii": functools.partial(_sum_bracket_trial, case="iii"),
    "iv": functools.partial(_sum_bracket_trial, case="iv"),
}
# options some runners accept
SIZED = {"onedim", "i_ii", "iii", "iv"}


def _run_one(args):
    kind, gjson, cfgjson, i, seq, opts = args
    g = AlgebraSpec.from_json(gjson)
    cfg = ExperimentConfig.from_json(cfgjson)
    rng = np.random.default_rng(seq)
    try:
        rec = RUNNERS[kind](g, cfg, i, rng, **opts)
    except BudgetExceeded as e:
        rec = {"trial": i, "outcome": "inconclusive", "note": str(e)}
    rec["seed"] = cfg.seed
    rec["case"] = kind
    return rec


def run_trials(
    kind: str, g: AlgebraSpec, cfg: ExperimentConfig, trials: int, workers: int = 1, set_size: int | None = None, t: int | None = None
) -> list[dict]:
    """Run `trials` seeded trials; the record list is independent of `workers`."""
    if cfg.seed is None:
        raise ValueError("experiments need an explicit seed")
    if kind not in RUNNERS:
        raise ValueError(f"unknown experiment {kind}")
    opts = {}
    if set_size is not None:
        if kind not in SIZED:
            raise ValueError(f"{kind} does not take a set size")
        opts["set_size"] = set_size
    if t is not None:
        if kind != "dimest":
            raise ValueError("only dimest takes t")
        opts["t"] = t
    seqs = np.random.SeedSequence(cfg.seed).spawn(trials)
    gj, cj = g.to_json(), cfg.to_json()
    jobs = [(kind, gj, cj, i, s, opts) for i, s in enumerate(seqs)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]
