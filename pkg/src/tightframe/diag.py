"""Single-entry perturbation that makes a planar frame operator diagonal."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllZero, WrongDimension
from .frame import Frame, frame_operator
from .linalg import frame_tolerance


@dataclass(frozen=True)
class DiagResult:
    chosen_vector: int  # 0-based
    chosen_entry_row: int  # 0-based coordinate holding the largest entry
    perturb_axis: int  # 0-based coordinate that is modified
    epsilon: float
    perturbed: Frame
    still_frame: bool


def _largest_entry(vectors: np.ndarray) -> tuple[int, int]:
    # ties: larger vector index first, then smaller row
    mags = np.abs(vectors)
    best = mags.max()
    j = int(np.flatnonzero((mags == best).any(axis=1))[-1])
    i = int(np.flatnonzero(mags[j] == best)[0])
    return j, i


def diagonalize(F: Frame) -> DiagResult:
    """Zero the off-diagonal of S by moving one coordinate of one vector.

    With rows ``u1, u2`` of the synthesis matrix and ``v_j(i)`` its entry of
    largest magnitude, adding ``-<u1, u2> / v_j(i)`` to coordinate ``1 - i``
    of ``v_j`` cancels ``<u1, u2>``. Diagonality is guaranteed; spanning is
    not, hence ``still_frame``.
    """
    if F.dim != 2:
        raise WrongDimension(f"diagonalize works in R^2 only, got dimension {F.dim}")
    v = F.vectors
    if not np.any(v):
        raise AllZero("every vector is zero")
    j, i = _largest_entry(v)
    axis = 1 - i
    cross = float(v[:, 0] @ v[:, 1])
    eps = float(-cross / v[j, i]) if cross != 0.0 else 0.0
    if eps == 0.0:
        out = F
    else:
        w = v.copy()
        w[j, axis] += eps
        out = Frame(w)
    diag = np.diag(frame_operator(out))
    still = bool(diag.min() > frame_tolerance(float(diag.max())))
    return DiagResult(j, i, axis, eps, out, still)
