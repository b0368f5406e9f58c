"""Differentiable parameterizations of (near-)orthogonal transforms.

Two routes into the orthogonal group, each with a vector-Jacobian product
for hand-rolled gradient descent:

* Householder reflection H = I - 2 vhat vhat^T from a single vector. The
  vector is normalized inside the map, so unconstrained steps on v always
  produce an exactly orthogonal (symmetric, involutive) H.
* Matrix exponential of a square matrix. Skew-symmetric input gives a
  rotation (orthogonal, det +1); training may move the matrix off skew,
  deliberately leaving the orthogonal group.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, expm_frechet

MIN_VECTOR_NORM = 1e-8


@dataclass
class HouseholderParam:
    """One reflection vector per fusion block (each full-dimensional)."""

    vectors: list

    def copy(self):
        return HouseholderParam([v.copy() for v in self.vectors])


@dataclass
class ExpParam:
    """Matrix whose exponential is the fusion transform."""

    A: np.ndarray

    def copy(self):
        return ExpParam(self.A.copy())


def householder_matrix(v) -> np.ndarray:
    """H = I - 2 vhat vhat^T; symmetric, orthogonal, det -1."""
    v = np.asarray(v, dtype=float)
    nrm = np.linalg.norm(v)
    if nrm <= MIN_VECTOR_NORM:
        raise ValueError("reflection vector too close to zero")
    vh = v / nrm
    return np.eye(len(v)) - 2.0 * np.outer(vh, vh)


def householder_vjp(v, Hbar) -> np.ndarray:
    """dL/dv given dL/dH for H = householder_matrix(v).

    With vhat = v/||v||: dL/dvhat = -2 (Hbar + Hbar^T) vhat, then the
    normalization projects out the radial component and divides by ||v||.
    """
    v = np.asarray(v, dtype=float)
    nrm = np.linalg.norm(v)
    if nrm <= MIN_VECTOR_NORM:
        raise ValueError("reflection vector too close to zero")
    vh = v / nrm
    g_vh = -2.0 * (Hbar + Hbar.T) @ vh
    return (g_vh - (g_vh @ vh) * vh) / nrm


def matrix_exp(A) -> np.ndarray:
    """Matrix exponential (scaling-and-squaring Pade, via scipy)."""
    A = np.asarray(A, dtype=float)
    if not np.isfinite(A).all():
        raise ValueError("non-finite entries in matrix exponential input")
    return expm(A)


def matrix_exp_vjp(A, Gbar) -> np.ndarray:
    """dL/dA given dL/dexp(A): adjoint Frechet derivative, L_expm(A^T, Gbar)."""
    A = np.asarray(A, dtype=float)
    Gbar = np.asarray(Gbar, dtype=float)
    if not (np.isfinite(A).all() and np.isfinite(Gbar).all()):
        raise ValueError("non-finite entries in matrix exponential vjp input")
    return expm_frechet(A.T, Gbar, compute_expm=False)


def skew_init(n: int, scale: float, rng: np.random.Generator) -> ExpParam:
    """Skew-symmetric start A = scale * (M - M^T)/2, M standard normal."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    if scale == 0.0:
        return ExpParam(np.zeros((n, n)))
    M = rng.standard_normal((n, n))
    return ExpParam(scale * (M - M.T) / 2.0)
