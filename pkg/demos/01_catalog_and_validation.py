"""Browse the lattice catalog and validate entries with the enumeration oracle.

Every catalog generator can be cross-checked three independent ways: its
Gram determinant, its kissing number, and a Monte Carlo estimate of its NSM
against the stored reference. This script runs all three for a few entries.
"""

import numpy as np

from latquant import catalog_get, catalog_names, gram, kissing_number, volume
from latquant import estimate_nsm, shortest_vector

print("catalog:", ", ".join(catalog_names()))
print()

for name, want_det, want_kiss in [("A2", 3, 6), ("D4", 4, 24),
                                  ("E8", 1, 240), ("K12", 729, 756),
                                  ("L16", 256, 4320)]:
    rec = catalog_get(name)
    G = rec.generator
    det = np.linalg.det(gram(G))
    kiss = kissing_number(G)
    sv = shortest_vector(G)
    print(f"{name}: dim {rec.dim}, volume {volume(G):.6g} "
          f"(reference {rec.reference_volume:.6g})")
    print(f"   Gram determinant {det:.6f} (expected {want_det})")
    print(f"   shortest vector norm^2 {sv.dist_sq:.6f}, "
          f"kissing number {kiss} (expected {want_kiss})")
    e = estimate_nsm(G, 50000, seed=1)
    drift = abs(e.mean - rec.reference_nsm) / e.std_of_mean
    print(f"   NSM {e.mean:.6f} vs reference {rec.reference_nsm:.6f} "
          f"({drift:.1f} sigma)")
    print()
