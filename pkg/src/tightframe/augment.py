"""Tightness of a tight frame after appending or erasing vectors.

Appending to an A-tight frame keeps it tight exactly when the appended
family's frame operator is a multiple ``c I`` of the identity; the new bound
is then ``A + c``. Reading the same identity backwards: erasing ``p`` vectors
leaves a tight frame only if the erased vectors were themselves tight with a
bound below ``A``, which needs ``p >= n``.

A consequence worth knowing: a frame with a scalable sub-frame of ``p``
elements, and fewer than ``n`` remaining vectors, is not itself scalable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionMismatch, InvalidIndices, NotAFrame, NotTight
from .frame import Frame, FrameReport, analyze, frame_operator

MULTIPLE_OF_IDENTITY_TOL = 1e-9

RULE_FEW = "p<n: never tight"
RULE_MANY = "p≥n: tight iff erased tight"


def _tight_base(base: Frame) -> FrameReport:
    report = analyze(base)
    if not report.is_tight:
        raise NotTight(f"base frame is not tight (kappa = {report.condition_number!r})")
    return report


def identity_multiple(S: np.ndarray, scale: float) -> tuple[bool, float]:
    """Whether ``S`` is ``c I`` within ``1e-9 * max(1, c, scale)``; returns ``(flag, c)``."""
    n = S.shape[0]
    c = float(np.trace(S)) / n
    resid = float(np.linalg.norm(S - c * np.eye(n)))
    return resid <= MULTIPLE_OF_IDENTITY_TOL * max(1.0, abs(c), scale), c


@dataclass(frozen=True)
class AppendVerdict:
    combined_tight: bool
    appended_tight: bool
    appended_bound: float | None
    combined_bound: float | None
    degenerate: bool
    combined_report: FrameReport


def append_check(base: Frame, added) -> AppendVerdict:
    report = _tight_base(base)
    A = report.lower_bound
    extra = np.asarray(added, dtype=float)
    if extra.ndim == 1:
        extra = extra.reshape(1, -1)
    if extra.ndim != 2 or extra.shape[0] == 0 or extra.shape[1] != base.dim:
        raise DimensionMismatch(f"appended vectors must have length {base.dim}")
    added_frame = Frame(extra)
    S_add = frame_operator(added_frame)
    tight, c = identity_multiple(S_add, A)
    degenerate = tight and c <= MULTIPLE_OF_IDENTITY_TOL * max(1.0, A)
    combined = Frame(np.vstack([base.vectors, extra]))
    return AppendVerdict(
        combined_tight=tight,
        appended_tight=tight and not degenerate,
        appended_bound=c if tight else None,
        combined_bound=A + c if tight else None,
        degenerate=degenerate,
        combined_report=analyze(combined),
    )


@dataclass(frozen=True)
class ErasureVerdict:
    erased_count: int
    remainder_is_frame: bool
    remainder_tight: bool
    remainder_report: FrameReport | None
    erased_tight: bool
    erased_bound: float | None
    degenerate: bool
    rule_applied: str


def _normalize_indices(indices: Iterable[int], k: int) -> list[int]:
    idx = sorted(set(int(i) for i in indices))
    if not idx:
        raise InvalidIndices("no indices to erase")
    if idx[0] < 0 or idx[-1] >= k:
        raise InvalidIndices(f"indices must lie in [0, {k - 1}]")
    if len(idx) == k:
        raise InvalidIndices("cannot erase every vector")
    return idx


def erase_check(base: Frame, indices: Iterable[int]) -> ErasureVerdict:
    """Erase the (0-based) ``indices`` from a tight frame and classify the result.

    ``degenerate`` marks an erased set made only of zero vectors, the one
    case where fewer than ``n`` erasures leave the frame tight.
    """
    _tight_base(base)
    k, n = len(base), base.dim
    idx = _normalize_indices(indices, k)
    keep = [j for j in range(k) if j not in set(idx)]
    erased = base.subset(idx)
    remainder = base.subset(keep)

    try:
        rem_report = analyze(remainder)
    except NotAFrame:
        rem_report = None
    try:
        er_report = analyze(erased)
    except NotAFrame:
        er_report = None

    erased_tight = er_report is not None and er_report.is_tight
    return ErasureVerdict(
        erased_count=len(idx),
        remainder_is_frame=rem_report is not None,
        remainder_tight=rem_report is not None and rem_report.is_tight,
        remainder_report=rem_report,
        erased_tight=erased_tight,
        erased_bound=er_report.lower_bound if erased_tight else None,
        degenerate=not np.any(erased.vectors),
        rule_applied=RULE_FEW if len(idx) < n else RULE_MANY,
    )
