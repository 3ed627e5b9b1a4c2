"""Finite frames in R^n: operators, optimal bounds, duals and reconstruction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, NotAFrame
from .linalg import Spectrum, frame_tolerance, spd_apply_inverse, symmetric_eigen

TIGHT_TOL = 1e-8


class Frame:
    """An ordered, immutable family of ``k >= 1`` vectors in R^dim.

    The frame property itself is not enforced; use :func:`analyze` or
    :func:`is_frame`. Vectors are stored as the rows of a read-only
    ``(k, dim)`` array.
    """

    __slots__ = ("_v",)

    def __init__(self, vectors, dim: int | None = None):
        v = np.array(vectors, dtype=float)
        if v.ndim == 1 and v.size and dim == 1:
            v = v.reshape(-1, 1)
        if v.ndim != 2 or v.shape[0] == 0:
            raise DimensionMismatch("a frame needs at least one vector given as a 2-D array")
        if dim is not None and v.shape[1] != dim:
            raise DimensionMismatch(f"vectors have length {v.shape[1]}, expected {dim}")
        if v.shape[1] == 0:
            raise DimensionMismatch("dimension must be positive")
        if not np.all(np.isfinite(v)):
            raise ValueError("frame vectors must have finite coordinates")
        v.flags.writeable = False
        self._v = v

    @property
    def vectors(self) -> np.ndarray:
        return self._v

    @property
    def dim(self) -> int:
        return self._v.shape[1]

    def __len__(self) -> int:
        return self._v.shape[0]

    def __iter__(self):
        return iter(self._v)

    def __getitem__(self, j):
        return self._v[j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self._v.shape == other._v.shape and bool(np.all(self._v == other._v))

    def __hash__(self):
        return hash((self._v.shape, self._v.tobytes()))

    def __repr__(self) -> str:
        return f"Frame(dim={self.dim}, k={len(self)}, vectors={self._v.tolist()!r})"

    def subset(self, indices: Iterable[int]) -> "Frame":
        return Frame(self._v[list(indices)])

    def scaled(self, s: float) -> "Frame":
        return Frame(s * self._v)


@dataclass(frozen=True)
class FrameReport:
    lower_bound: float
    upper_bound: float
    condition_number: float
    is_tight: bool
    eigenvalues: tuple[float, ...]


def synthesis_matrix(F: Frame) -> np.ndarray:
    """``n x k`` matrix whose columns are the frame vectors."""
    return F.vectors.T.copy()


def frame_operator(F: Frame) -> np.ndarray:
    T = F.vectors.T
    S = T @ T.T
    return 0.5 * (S + S.T)


def frame_spectrum(F: Frame) -> Spectrum:
    return symmetric_eigen(frame_operator(F))


def report_from_spectrum(lam: np.ndarray) -> FrameReport:
    A, B = float(lam[0]), float(lam[-1])
    if A <= frame_tolerance(B):
        raise NotAFrame(f"family does not span: smallest frame-operator eigenvalue is {A:.3g}")
    kappa = B / A
    return FrameReport(A, B, kappa, kappa - 1.0 <= TIGHT_TOL, tuple(float(x) for x in lam))


def analyze(F: Frame) -> FrameReport:
    """Optimal frame bounds and condition number.

    Raises NotAFrame when the family does not span R^n.
    """
    return report_from_spectrum(frame_spectrum(F).eigenvalues)


def is_frame(F: Frame) -> bool:
    try:
        analyze(F)
    except NotAFrame:
        return False
    return True


def frame_sum(F: Frame, x) -> float:
    """``sum_j <x, v_j>^2``, evaluated as the quadratic form of S."""
    x = np.asarray(x, dtype=float)
    return float(x @ frame_operator(F) @ x)


def canonical_dual(F: Frame) -> Frame:
    spec = frame_spectrum(F)
    report_from_spectrum(spec.eigenvalues)
    S = frame_operator(F)
    return Frame(spd_apply_inverse(S, F.vectors.T, spec).T)


def reconstruct(F: Frame, x) -> np.ndarray:
    """Rebuild ``x`` from its canonical-dual coefficients ``<x, S^-1 v_j>``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (F.dim,):
        raise DimensionMismatch(f"vector has shape {x.shape}, frame dimension is {F.dim}")
    dual = canonical_dual(F)
    coeffs = dual.vectors @ x
    return F.vectors.T @ coeffs


def tight_bound_identity(F: Frame) -> float:
    """``(1/n) sum_j ||v_j||^2``; equals the frame bound when F is tight."""
    return float(np.sum(F.vectors**2)) / F.dim


def stack(frames: Sequence[Frame]) -> Frame:
    dims = {f.dim for f in frames}
    if len(dims) != 1:
        raise DimensionMismatch(f"frames have different dimensions: {sorted(dims)}")
    return Frame(np.vstack([f.vectors for f in frames]))
