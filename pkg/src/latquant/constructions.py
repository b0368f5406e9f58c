"""Constructions of the named component lattices.

Each lattice is built from an exact integer (or rational) Gram matrix and
realized as a lower-triangular generator by Cholesky factorization, so the
checked-in catalog can be regenerated and cross-validated at any time.

Sources are the standard constructions:

* root lattices A_n, D_n, E6, E7, E8 from their Cartan matrices
  (simple-root Gram matrices),
* K12 (Coxeter-Todd) as the Eisenstein lattice of vectors congruent to a
  hexacode word modulo 2,
* L16 (Barnes-Wall) from the first-order Reed-Muller code RM(1,4) with the
  coordinate-sum-divisible-by-4 condition, rescaled by 1/sqrt(2),
* duals as inverse-transpose of the primal generator.
"""

from fractions import Fraction

import numpy as np

from .cvp import int_det
from .lattices import GeneratorMatrix, LatticeRecord


def _cholesky_generator(gram_exact) -> GeneratorMatrix:
    g = np.array([[float(x) for x in row] for row in gram_exact])
    return GeneratorMatrix(np.linalg.cholesky(g))


# ---------------------------------------------------------------------------
# root lattices

def cartan_a(n):
    g = 2 * np.eye(n, dtype=np.int64)
    for i in range(n - 1):
        g[i, i + 1] = g[i + 1, i] = -1
    return g


def cartan_d(n):
    if n < 3:
        raise ValueError("D_n needs n >= 3")
    g = cartan_a(n)
    # fork: last node attaches to node n-3 instead of n-2
    g[n - 1, n - 2] = g[n - 2, n - 1] = 0
    g[n - 1, n - 3] = g[n - 3, n - 1] = -1
    return g


def cartan_e(n):
    if n not in (6, 7, 8):
        raise ValueError("E_n defined for n in {6,7,8}")
    g = cartan_a(n)
    # branch node: E_n chain 0..n-2 with node n-1 attached to node 2
    g[n - 1, n - 2] = g[n - 2, n - 1] = 0
    g[n - 1, 2] = g[2, n - 1] = -1
    return g


# ---------------------------------------------------------------------------
# K12: Eisenstein construction from the hexacode
#
# GF(4) elements are encoded 0,1,2,3 for 0, 1, w, w^2 with w^2 = w + 1.

_GF4_EXP = {0: 1, 1: 2, 2: 3}
_GF4_LOG = {1: 0, 2: 1, 3: 2}


def _gf4_add(a, b):
    enc = {0: (0, 0), 1: (1, 0), 2: (0, 1), 3: (1, 1)}
    dec = {v: k for k, v in enc.items()}
    x, y = enc[a], enc[b]
    return dec[(x[0] ^ y[0], x[1] ^ y[1])]


def _gf4_mul(a, b):
    if a == 0 or b == 0:
        return 0
    return _GF4_EXP[(_GF4_LOG[a] + _GF4_LOG[b]) % 3]


def hexacode_generators():
    """Systematic generators of the [6,3,4] hexacode over GF(4).

    Codewords are (a, b, c, f(1), f(w), f(w^2)) with f(x) = a x^2 + b x + c.
    """
    gens = []
    for a, b, c in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        row = [a, b, c]
        for x in (1, 2, 3):
            v = _gf4_add(_gf4_add(_gf4_mul(a, _gf4_mul(x, x)), _gf4_mul(b, x)), c)
            row.append(v)
        gens.append(row)
    return gens


def hexacode_words():
    """All 64 hexacode words (used by validation tests)."""
    words = []
    for a in range(4):
        for b in range(4):
            for c in range(4):
                row = [a, b, c]
                for x in (1, 2, 3):
                    v = _gf4_add(_gf4_add(_gf4_mul(a, _gf4_mul(x, x)), _gf4_mul(b, x)), c)
                    row.append(v)
                words.append(row)
    return words


def k12_gram():
    """Exact Gram matrix of the Coxeter-Todd lattice (min 4, det 729).

    K12 = {x in Z[w]^6 : x mod 2 in hexacode}, realized over Z via the
    coordinates x_j = a_j + b_j*w.  The real inner product of two Eisenstein
    coordinates is <(a,b),(c,d)> = ac + bd - (ad + bc)/2.
    """
    # GF(4) -> Eisenstein lift: 0, 1, w, w^2 = -1-w
    lift = {0: (0, 0), 1: (1, 0), 2: (0, 1), 3: (-1, -1)}

    zw_basis = [[lift[v] for v in cw] for cw in hexacode_generators()]
    for j in range(3, 6):
        row = [(0, 0)] * 6
        row[j] = (2, 0)
        zw_basis.append(row)

    def mul_w(p):  # w * (a + b*w) = -b + (a-b)*w
        a, b = p
        return (-b, a - b)

    int_basis = []
    for g in zw_basis:
        int_basis.append([c for p in g for c in p])
        int_basis.append([c for p in g for c in mul_w(p)])

    def dot(u, v):
        s = Fraction(0)
        for j in range(6):
            a, b = u[2 * j], u[2 * j + 1]
            c, d = v[2 * j], v[2 * j + 1]
            s += Fraction(2 * (a * c + b * d) - (a * d + b * c), 2)
        return s

    n = 12
    g = [[dot(int_basis[i], int_basis[j]) for j in range(n)] for i in range(n)]
    assert all(x.denominator == 1 for row in g for x in row)
    return np.array([[int(x) for x in row] for row in g], dtype=np.int64)


# ---------------------------------------------------------------------------
# L16: Barnes-Wall construction from RM(1,4)

def rm14_generators():
    """Generator rows of the [16,5,8] first-order Reed-Muller code."""
    gens = [np.ones(16, dtype=np.int64)]
    for bit in range(4):
        gens.append(np.array([(i >> bit) & 1 for i in range(16)], dtype=np.int64))
    return np.array(gens)


def l16_gram():
    """Exact Gram matrix of Barnes-Wall Lambda16 (min 4, det 256).

    Basis of {x in Z^16 : x mod 2 in RM(1,4), sum(x) = 0 mod 4}, then the
    lattice is rescaled by 1/sqrt(2), i.e. the Gram is halved.
    """
    m = rm14_generators() % 2
    # systematic form over GF(2), tracking pivot columns
    pivots = []
    r = 0
    for c in range(16):
        piv = next((i for i in range(r, 5) if m[i, c]), None)
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        for i in range(5):
            if i != r and m[i, c]:
                m[i] = (m[i] + m[r]) % 2
        pivots.append(c)
        r += 1
        if r == 5:
            break

    basis = [m[i].astype(np.int64) for i in range(5)]
    for j in range(16):
        if j not in pivots:
            row = np.zeros(16, dtype=np.int64)
            row[j] = 2
            basis.append(row)
    basis = np.array(basis)

    # enforce sum = 0 mod 4 (index-2 sublattice)
    sums = basis.sum(axis=1) % 4
    assert set(sums.tolist()) <= {0, 2}
    pivot_row = int(np.where(sums == 2)[0][0])
    fixed = basis.copy()
    for i in range(16):
        if i != pivot_row and sums[i] == 2:
            fixed[i] = basis[i] - basis[pivot_row]
    fixed[pivot_row] = 2 * basis[pivot_row]
    assert (fixed.sum(axis=1) % 4 == 0).all()

    g2 = fixed @ fixed.T
    assert (g2 % 2 == 0).all()
    return (g2 // 2).astype(np.int64)


# ---------------------------------------------------------------------------
# assembly

def dual_generator(G: GeneratorMatrix) -> GeneratorMatrix:
    """Dual lattice generator: rows are the dual basis (G^-1)^T."""
    return GeneratorMatrix(np.linalg.inv(G.rows).T)


def primal_gram(name: str):
    """Exact integer Gram matrix for a primal catalog family member."""
    family, num = name[0], name[1:]
    if family == "Z":
        return np.eye(int(num), dtype=np.int64)
    if family == "A":
        return cartan_a(int(num))
    if family == "D":
        return cartan_d(int(num))
    if family == "E":
        return cartan_e(int(num))
    if name == "K12":
        return k12_gram()
    if name == "L16":
        return l16_gram()
    raise ValueError(f"no construction for {name!r}")


def build_generator(name: str) -> GeneratorMatrix:
    """Generator for any catalog name, including duals ('A3s' etc.)."""
    if name.endswith("s"):
        return dual_generator(build_generator(name[:-1]))
    return _cholesky_generator(primal_gram(name))


def exact_volume(name: str) -> float:
    """Volume sqrt(det Gram), exact integer determinant under the root."""
    if name.endswith("s"):
        return 1.0 / exact_volume(name[:-1])
    return float(np.sqrt(float(int_det(primal_gram(name)))))


def build_record(name: str, reference_nsm=None, comment="") -> LatticeRecord:
    return LatticeRecord(
        name=name,
        generator=build_generator(name),
        reference_volume=exact_volume(name),
        reference_nsm=reference_nsm,
        comment=comment,
    )
