"""Exact sum-product facts over small fields.

Run: python3 demos/sum_product.py
"""
from bracketgrowth.kernel import gf
from bracketgrowth.sumprod import (
    ScalarSet,
    cauchy_davenport_exhaustive,
    covering_check,
    covering_sweep,
    dichotomy_report,
    growth_ratio_stats,
    threshold_size,
)

# a large enough set of squares-of-products covers every nonzero element
for q, d in ((11, 2), (13, 3)):
    n = threshold_size(q, d)
    rows = covering_sweep(q, d, 200, seed=1)
    print(f"GF({q}), d={d}: threshold |X|={n}; {sum(r['verdict'] == 'covers' for r in rows)}/{len(rows)} sets cover")

# just below the threshold a set can miss
X = ScalarSet.of(gf(13), [1, 5])
r = covering_check(X, 2)
print(f"X={{1,5}} in GF(13): covers={r.covers}, first missing={r.missing}, {r.flag}")

for p in (3, 5, 7):
    cd = cauchy_davenport_exhaustive(p)
    print(f"Cauchy-Davenport mod {p}: {cd['pairs']} pairs, {cd['violations']} violations")

print("\n|XX+XX+XX| for random 10-sets in GF(101):", growth_ratio_stats(101, 10, 200, seed=0))

# a subfield does not grow; a random set does
F = gf(5, 2)
sub = ScalarSet.of(F, range(5))
print("\nGF(5) inside GF(25):", dichotomy_report(sub, "1/10"))
