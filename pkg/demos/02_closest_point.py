"""Exact closest-vector queries: Babai approximation vs sphere decoding.

The solver LLL-reduces the basis once and answers exact nearest-point
queries by enumeration seeded at the Babai point. On a skewed basis the
Babai answer can be noticeably worse; the exact answer never is.
"""

import numpy as np

from latquant import ClosestPointSolver, GeneratorMatrix, catalog_get

# a deliberately skewed basis of the integer lattice Z^2
G = GeneratorMatrix(np.array([[1.0, 0.0], [1000.0, 1.0]]))
solver = ClosestPointSolver(G)
x = np.array([0.4, 0.6])
print("skewed Z^2 basis, target", x)
print("  babai:", solver.babai(x).dist_sq, " exact:", solver.closest(x).dist_sq)
print()

# deep hole of the hexagonal lattice: the circumcenter of a fundamental
# triangle sits at squared distance 1/3 from all three corners
A2 = catalog_get("A2").generator
hole = np.array([0.5, np.sqrt(3) / 6])
res = ClosestPointSolver(A2).closest(hole)
print(f"hexagonal deep hole: dist^2 {res.dist_sq:.6f} (covering radius^2 = 1/3)")
print()

# quantization error statistics on K12
K12 = catalog_get("K12").generator
solver = ClosestPointSolver(K12)
rng = np.random.default_rng(0)
xs = rng.random((2000, 12)) @ K12.rows
_, dists = solver.closest_batch(xs)
print(f"K12: mean squared error over 2000 uniform points {dists.mean():.4f}")
print(f"     (12 * NSM * V^(2/12) = {12 * 0.070095 * 27 ** (1 / 6):.4f})")
