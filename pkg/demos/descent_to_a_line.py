"""Descend from the whole algebra to a line for random sets in sl_2(F_11).

Each step replaces a subspace V by a smaller W through a separating linear
map and records the counting inequality that justifies it.  At the end the
set either grows by a power or puts many points on one line.

Run: python3 demos/descent_to_a_line.py [seed]
"""
import sys

from bracketgrowth.algebra import build_classical
from bracketgrowth.descent import ExperimentConfig, onedim_pipeline, reverify
from bracketgrowth.experiments import random_generating_set, trial_rngs
from bracketgrowth.extremal import build_extremal_basis
from bracketgrowth.growth import GrowthSet
from bracketgrowth.kernel import gf

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
g = build_classical("sl", 2, gf(11))
eb = build_extremal_basis(g)
cfg = ExperimentConfig(seed=seed)

for i, rng in enumerate(trial_rngs(seed, 3)):
    elems = random_generating_set(g, rng)
    res = onedim_pipeline(GrowthSet.from_elements(g, elems), cfg, eb)
    print(f"set {i}: |A|={res.size_A}, outcome {res.outcome} at k={res.k} (|A^k|={res.size_k})")
    for s in res.trace.steps:
        print(f"   dim {s.V.dim} -> {s.W.dim} via {s.branch}: t={s.t} m={s.m} k={s.k}")
    print(f"   re-verified with the other representation: {reverify(g, elems, res)}")
