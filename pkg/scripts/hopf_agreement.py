"""Compare the cup-product Hopf invariant with the linking-number oracle.

Builds the degree-d simplicial Hopf maps on the subdivided join of two
polygons and prints both invariants for several target pairs.
"""
import time

from nullwidth.hopf import hopf_cup, hopf_linking_oracle, simplicial_hopf_map

CASES = [(1, 6, 2), (-1, 6, 2), (2, 6, 3), (-2, 6, 3)]

for d, n, L in CASES:
    t0 = time.perf_counter()
    f = simplicial_hopf_map(d, n, L)
    cups = [hopf_cup(f.degree_cochain(j)) for j in range(4)]
    links = [hopf_linking_oracle(f, pair) for pair in ((0, 1), (2, 3))]
    print(f"d={d:+d} vertices={f.domain.count(0)} cup={[str(c) for c in cups]} "
          f"linking={[str(x) for x in links]} {time.perf_counter() - t0:.1f}s")
