"""Small dense real linear algebra built on cyclic Jacobi rotations.

Only what the frame routines need: a symmetric eigensolver, an inverse
applied through the eigendecomposition, and the spectral norm.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NonSymmetric, NoConvergence, SingularOperator

SYMMETRY_TOL = 1e-12
OFFDIAG_TOL = 1e-14
MAX_SWEEPS = 100
SINGULAR_REL_TOL = 1e-10


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # column i pairs with eigenvalues[i]


def as_matrix(M) -> np.ndarray:
    a = np.array(M, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.size == 0:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def frame_tolerance(lam_max: float) -> float:
    """Threshold below which a smallest eigenvalue is treated as zero."""
    return SINGULAR_REL_TOL * max(1.0, lam_max)


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def _canonical_signs(v: np.ndarray) -> np.ndarray:
    # first component above noise level is made positive
    v = v.copy()
    for i in range(v.shape[1]):
        col = v[:, i]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            v[:, i] = -col
    return v


def symmetric_eigen(S) -> Spectrum:
    """Eigendecomposition of a real symmetric matrix.

    Cyclic-by-row Jacobi sweeps until the off-diagonal Frobenius norm drops
    below ``1e-14 * max(1, ||S||_F)``. Eigenvalues come back ascending with
    sign-normalized eigenvector columns, so identical input gives identical
    output.
    """
    a = as_matrix(S)
    n, m = a.shape
    if n != m:
        raise NonSymmetric(f"matrix is not square: {a.shape}")
    scale = max(1.0, float(np.linalg.norm(a)))
    if np.linalg.norm(a - a.T) > SYMMETRY_TOL * scale:
        raise NonSymmetric("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    target = OFFDIAG_TOL * scale

    sweeps = 0
    while _off_norm(a) > target:
        if sweeps == MAX_SWEEPS:
            raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app, aqq = a[p, p], a[q, q]
                h = aqq - app
                if abs(apq) < 1e-150 * abs(h):
                    # theta**2 would overflow; t ~ 1/(2 theta)
                    t = apq / h
                else:
                    theta = h / (2.0 * apq)
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                cp = a[:, p].copy()
                cq = a[:, q]
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                # the closed form is more accurate than the rotated entries
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0

                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return Spectrum(w[order], _canonical_signs(v[:, order]))


def spd_apply_inverse(S, x, spectrum: Spectrum | None = None) -> np.ndarray:
    """Solve ``S y = x`` for symmetric positive definite ``S``.

    Pass a precomputed ``spectrum`` of ``S`` to skip the eigensolve.
    """
    spec = spectrum if spectrum is not None else symmetric_eigen(S)
    lam, q = spec
    if lam[0] <= frame_tolerance(lam[-1]):
        raise SingularOperator(f"smallest eigenvalue {lam[0]:.3g} is numerically zero")
    x = np.asarray(x, dtype=float)
    if x.shape[0] != lam.shape[0]:
        raise DimensionMismatch(f"vector length {x.shape[0]} != matrix size {lam.shape[0]}")
    coeffs = q.T @ x
    if x.ndim == 1:
        return q @ (coeffs / lam)
    return q @ (coeffs / lam[:, None])


def operator_norm(M) -> float:
    """Largest singular value, via the smaller Gram matrix."""
    a = as_matrix(M)
    gram = a.T @ a if a.shape[1] <= a.shape[0] else a @ a.T
    lam = symmetric_eigen(gram).eigenvalues
    return math.sqrt(max(float(lam[-1]), 0.0))
