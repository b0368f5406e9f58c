"""Exact closest-vector and shortest-vector computation.

The solver LLL-reduces the basis once, maps targets into the orthonormal
frame of the reduced basis, and runs an exact sphere-decoding search seeded
by the Babai nearest-plane point. Intended for dimensions up to ~22.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .lattices import GeneratorMatrix, gram

DEFAULT_DELTA = 0.99
RADIUS_SLACK = 1e-9


@dataclass(frozen=True)
class ReducedBasis:
    """LLL-reduced basis: reduced = transform @ original, transform unimodular."""

    reduced: GeneratorMatrix
    transform: np.ndarray  # integer entries (object dtype, exact)


@dataclass(frozen=True)
class CvpResult:
    coeffs: np.ndarray  # integer coefficient vector z
    dist_sq: float      # ||x - z G||^2


def int_det(M) -> int:
    """Exact determinant of an integer matrix via fraction-free elimination."""
    M = [[int(x) for x in row] for row in M]
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for r in range(k + 1, n):
                if M[r][k] != 0:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def _gram_schmidt(B):
    """Returns (mu, bstar_sq): GS coefficients (strictly lower) and norms."""
    n = B.shape[0]
    bstar = np.zeros_like(B)
    mu = np.zeros((n, n))
    bstar_sq = np.zeros(n)
    for i in range(n):
        v = B[i].copy()
        for j in range(i):
            mu[i, j] = (B[i] @ bstar[j]) / bstar_sq[j]
            v -= mu[i, j] * bstar[j]
        bstar[i] = v
        bstar_sq[i] = v @ v
    return mu, bstar_sq


def lll_reduce(G: GeneratorMatrix, delta: float = DEFAULT_DELTA) -> ReducedBasis:
    """LLL reduction with Lovász parameter delta, tracking the unimodular map.

    Gram-Schmidt data is recomputed after every basis change; at the
    dimensions this library targets that costs nothing and avoids update
    bookkeeping.
    """
    if not 0.25 < delta < 1.0:
        raise ValueError(f"delta must lie in (0.25, 1), got {delta}")
    B = G.rows.copy()
    n = B.shape[0]
    U = np.array([[1 if i == j else 0 for j in range(n)] for i in range(n)],
                 dtype=object)
    mu, bstar_sq = _gram_schmidt(B)
    k = 1
    guard = 0
    max_steps = 100000 * n * n
    while k < n:
        guard += 1
        if guard > max_steps:
            raise RuntimeError("LLL failed to terminate (numerically degenerate input?)")
        changed = False
        for j in range(k - 1, -1, -1):
            m = round(mu[k, j])
            if m != 0:
                B[k] -= m * B[j]
                U[k] -= m * U[j]
                # exact effect of the row operation on row k's GS coefficients
                mu[k, :j] -= m * mu[j, :j]
                mu[k, j] -= m
                changed = True
        if changed:
            mu, bstar_sq = _gram_schmidt(B)
        if bstar_sq[k] >= (delta - mu[k, k - 1] ** 2) * bstar_sq[k - 1]:
            k += 1
        else:
            B[[k, k - 1]] = B[[k - 1, k]]
            U[[k, k - 1]] = U[[k - 1, k]]
            mu, bstar_sq = _gram_schmidt(B)
            k = max(k - 1, 1)
    return ReducedBasis(reduced=GeneratorMatrix(B), transform=U)


class ClosestPointSolver:
    """Caches the reduction and factorization for repeated queries on one G."""

    def __init__(self, G: GeneratorMatrix, delta: float = DEFAULT_DELTA):
        self.G = G
        red = lll_reduce(G, delta)
        self.reduction = red
        R = red.reduced.rows
        self.U = np.array([[int(x) for x in row] for row in red.transform],
                          dtype=np.int64)
        self.L = np.linalg.cholesky(R @ R.T)
        # orthogonal map into the frame where the basis is self.L
        self.frame = np.linalg.solve(R, self.L)
        self._min_row_sq = float(np.min(np.einsum("ij,ij->i", R, R)))

    def to_frame(self, x):
        return np.asarray(x, dtype=float) @ self.frame

    def closest(self, x) -> CvpResult:
        x = np.asarray(x, dtype=float)
        w = _kernels.clp(self.L, x @ self.frame)
        z = np.round(w).astype(np.int64) @ self.U
        e = x - z @ self.G.rows
        return CvpResult(coeffs=z, dist_sq=float(e @ e))

    def closest_batch(self, xs):
        """dist_sq per row of xs, computed in the reduced frame."""
        xs = np.ascontiguousarray(np.asarray(xs, dtype=float) @ self.frame)
        m, n = xs.shape
        coeffs = np.zeros((m, n))
        dists = np.zeros(m)
        _kernels.clp_batch(self.L, xs, coeffs, dists)
        return coeffs @ self.U.astype(float), dists

    def babai(self, x) -> CvpResult:
        x = np.asarray(x, dtype=float)
        w = _kernels.babai(self.L, x @ self.frame)
        z = np.round(w).astype(np.int64) @ self.U
        e = x - z @ self.G.rows
        return CvpResult(coeffs=z, dist_sq=float(e @ e))

    def vectors_below(self, bound, max_count=400000):
        """Integer coeffs (original basis) of all nonzero v with ||v||^2 <= bound."""
        count, ws = _kernels.enumerate_below(self.L, float(bound), max_count)
        if count < 0:
            raise RuntimeError(f"more than {max_count} lattice vectors below bound {bound}")
        return np.round(ws[:count]).astype(np.int64) @ self.U

    def shortest(self) -> CvpResult:
        ws = self.vectors_below(self._min_row_sq + RADIUS_SLACK)
        pts = ws @ self.G.rows
        norms = np.einsum("ij,ij->i", pts, pts)
        k = int(np.argmin(norms))
        return CvpResult(coeffs=ws[k], dist_sq=float(norms[k]))


def closest_point(G: GeneratorMatrix, x) -> CvpResult:
    """Global minimizer of ||x - z G|| (exact, via sphere decoding)."""
    return ClosestPointSolver(G).closest(x)


def babai_nearest(G: GeneratorMatrix, x) -> CvpResult:
    """Nearest-plane approximation on the LLL-reduced basis."""
    return ClosestPointSolver(G).babai(x)


def shortest_vector(G: GeneratorMatrix) -> CvpResult:
    """Nonzero lattice vector of minimum norm."""
    return ClosestPointSolver(G).shortest()


def kissing_number(G: GeneratorMatrix) -> int:
    """Count of lattice vectors at the minimum nonzero norm."""
    solver = ClosestPointSolver(G)
    min_sq = solver.shortest().dist_sq
    ws = solver.vectors_below(min_sq + RADIUS_SLACK)
    return int(ws.shape[0])
