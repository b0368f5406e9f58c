"""Numba kernels for lattice point search.

Both kernels work on a lower-triangular generator L whose rows are basis
vectors, i.e. they search over integer u for points u @ L.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def clp(L, r):
    """Exact closest lattice point to target r (Agrell-style sphere decoder).

    Depth-first search with best-first (zig-zag) child ordering and radius
    shrinking; the first leaf visited is the Babai nearest-plane point, so the
    search radius starts at the Babai distance. Returns the integer
    coefficient vector of a global minimizer of ||r - u L||.
    """
    n = L.shape[0]
    C = np.inf
    i = n
    d = np.full(n, n - 1, dtype=np.int64)
    lam = np.zeros(n + 1)
    F = np.zeros((n, n))
    F[n - 1, :] = r
    p = np.zeros(n)
    u = np.zeros(n)
    dlt = np.zeros(n)
    best = np.zeros(n)
    while True:
        while True:
            if i != 0:
                i -= 1
                for j in range(d[i], i, -1):
                    F[j - 1, i] = F[j, i] - u[j] * L[j, i]
                p[i] = F[i, i] / L[i, i]
                u[i] = np.round(p[i])
                y = (p[i] - u[i]) * L[i, i]
                dlt[i] = np.sign(y) if y != 0 else 1.0
                lam[i] = lam[i + 1] + y * y
            else:
                best[:] = u
                C = lam[0]
            if lam[i] >= C:
                break
        m = i
        while True:
            if i == n - 1:
                return best
            i += 1
            u[i] = u[i] + dlt[i]
            dlt[i] = -dlt[i] - np.sign(dlt[i])
            y = (p[i] - u[i]) * L[i, i]
            lam[i] = lam[i + 1] + y * y
            if lam[i] < C:
                break
        for j in range(m, i):
            d[j] = i
        for j in range(m - 1, -1, -1):
            if d[j] < i:
                d[j] = i
            else:
                break


@njit(cache=True)
def point_dist_sq(L, r, u):
    """Squared distance ||r - u L||^2 for a lower-triangular L."""
    n = L.shape[0]
    s = 0.0
    for i in range(n):
        acc = r[i]
        for j in range(i, n):
            acc -= u[j] * L[j, i]
        s += acc * acc
    return s


@njit(cache=True)
def clp_batch(L, targets, out_coeffs, out_dists):
    """Solve CVP for each row of ``targets``; fills coefficients and dist_sq."""
    for k in range(targets.shape[0]):
        u = clp(L, targets[k])
        out_coeffs[k, :] = u
        out_dists[k] = point_dist_sq(L, targets[k], u)


@njit(cache=True)
def babai(L, r):
    """Nearest-plane rounding on the lower-triangular basis."""
    n = L.shape[0]
    u = np.zeros(n)
    w = r.copy()
    for i in range(n - 1, -1, -1):
        u[i] = np.round(w[i] / L[i, i])
        for j in range(i + 1):
            w[j] -= u[i] * L[i, j]
    return u


@njit(cache=True)
def enumerate_below(L, bound, max_count):
    """All nonzero integer u with ||u L||^2 <= bound (both signs included).

    Depth-first traversal; children at each level are visited in zig-zag
    order around the real-valued center, which is nondecreasing in partial
    norm, so a level can be abandoned as soon as its contribution exceeds the
    bound. Returns (count, coeffs); count == -1 signals max_count overflow.
    """
    n = L.shape[0]
    u = np.zeros(n)
    p = np.zeros(n)
    dlt = np.zeros(n)
    lam = np.zeros(n + 1)  # lam[i]: norm contribution of levels i..n-1
    active = np.zeros(n, dtype=np.bool_)
    out = np.zeros((max_count, n))
    count = 0

    def _enter(level):
        # center of level given the fixed u[level+1..]
        s = 0.0
        for j in range(level + 1, n):
            s += u[j] * L[j, level]
        return -s / L[level, level]

    i = n - 1
    p[i] = 0.0
    u[i] = 0.0
    dlt[i] = 1.0
    lam[i] = 0.0
    active[i] = True
    while True:
        y = (p[i] - u[i]) * L[i, i]
        lam[i] = lam[i + 1] + y * y
        if lam[i] <= bound:
            if i == 0:
                nz = False
                for j in range(n):
                    if u[j] != 0.0:
                        nz = True
                        break
                if nz:
                    if count >= max_count:
                        return -1, out
                    out[count, :] = u
                    count += 1
                # next sibling at the leaf level
                u[0] += dlt[0]
                dlt[0] = -dlt[0] - np.sign(dlt[0])
            else:
                i -= 1
                c = _enter(i)
                p[i] = c
                u[i] = np.round(c)
                y0 = (c - u[i]) * L[i, i]
                dlt[i] = np.sign(y0) if y0 != 0 else 1.0
        else:
            # all remaining siblings here are at least this far out
            if i == n - 1:
                return count, out
            i += 1
            u[i] += dlt[i]
            dlt[i] = -dlt[i] - np.sign(dlt[i])
    return count, out
