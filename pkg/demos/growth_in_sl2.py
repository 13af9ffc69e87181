"""Watch a small symmetric set fill sl_2 over GF(5).

Run: python3 demos/growth_in_sl2.py
"""
import numpy as np

from bracketgrowth.algebra import build_classical
from bracketgrowth.growth import GrowthSet, fill_time, olson_dichotomy, two_pair_family, diameter_lower_bound
from bracketgrowth.kernel import gf

g = build_classical("sl", 2, gf(5))
print(f"{g.label} over GF(5): dimension {g.dim}, basis {list(g.names)}, {5 ** g.dim} elements")

# {0, ±e12, ±e21}: the two root vectors and their negatives
E = np.eye(g.dim, dtype=np.int64)
A = GrowthSet.from_elements(g, E[:2], symmetrize=True)
r = fill_time(A)
print(f"\n|A| = {len(A.base)}; layer sizes {r.sizes}; A^{r.k} is the whole algebra")

# every layer either stops at the generated subalgebra or grows by half
for k in (1, 2):
    o = olson_dichotomy(GrowthSet.from_elements(g, E[:2], symmetrize=True), k)
    print(f"k={k}: |X^k|={o.size_k} |X^4k|={o.size_4k} |X^6k|={o.size_6k} -> {o.horn}")

# the slowest two-pair set decides the diameter of the family
rep = diameter_lower_bound(g, two_pair_family(g))
print(f"\nworst fill time over {rep.generating} generating two-pair sets: {rep.max_fill}")
print("histogram of fill times:", rep.histogram)
print("a slowest set:", rep.argmax.tolist())
