"""Additive perturbations of frames.

The workhorse is the dual-direction perturbation ``v_j -> v_j + r S^-1 v_j``.
Its new frame operator is ``S + 2rI + r^2 S^-1``, so every eigenvalue moves
by the shift map ``lam -> lam + 2r + r^2/lam``. Choosing ``r`` below the
lower bound strictly lowers the condition number; choosing
``r = sqrt(A B)`` sends the extreme eigenvalues to the same value, which
collapses one more eigenvalue into the top cluster per step.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, DomainError, NoConvergence, NotAFrame, TauTooLarge
from .frame import (
    TIGHT_TOL,
    Frame,
    FrameReport,
    analyze,
    frame_operator,
    frame_spectrum,
    report_from_spectrum,
)
from .linalg import operator_norm, spd_apply_inverse

CLUSTER_TOL = 1e-9
POLISH_TOL = 1e-12


def spectral_shift(lam: float, r: float) -> float:
    if not lam > 0 or not r > 0:
        raise DomainError(f"spectral_shift needs lam > 0 and r > 0, got lam={lam}, r={r}")
    return lam + 2.0 * r + r * r / lam


def _dual_directions(F: Frame, spec) -> np.ndarray:
    # rows are S^-1 v_j
    return spd_apply_inverse(frame_operator(F), F.vectors.T, spec).T


def cluster_size(eigenvalues: Sequence[float]) -> int:
    """Number of eigenvalues within ``1e-9 * lam_max`` of the largest one."""
    lam = np.asarray(eigenvalues, dtype=float)
    top = lam[-1]
    return int(np.sum(top - lam <= CLUSTER_TOL * top))


@dataclass(frozen=True)
class ImproveResult:
    perturbed: Frame
    deltas: np.ndarray
    r_used: float
    report_before: FrameReport
    report_after: FrameReport


def improve_step(F: Frame, epsilon: float, safety: float = 0.9) -> ImproveResult:
    """One condition-number-reducing perturbation with ``max ||delta_j|| < epsilon``.

    ``r = safety * min(epsilon / max_j ||S^-1 v_j||, A)``; any r in that open
    interval works, ``safety`` just picks one.
    """
    if not epsilon > 0 or not math.isfinite(epsilon):
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not 0.0 < safety < 1.0:
        raise DomainError(f"safety must lie in (0, 1), got {safety}")
    spec = frame_spectrum(F)
    before = report_from_spectrum(spec.eigenvalues)
    dual = _dual_directions(F, spec)
    max_dual = float(np.max(np.linalg.norm(dual, axis=1)))
    r = safety * min(epsilon / max_dual, before.lower_bound)
    deltas = r * dual
    deltas.flags.writeable = False
    perturbed = Frame(F.vectors + deltas)
    return ImproveResult(perturbed, deltas, r, before, analyze(perturbed))


@dataclass(frozen=True)
class TighteningStep:
    step_index: int
    r: float
    bounds_before: tuple[float, float]
    bounds_after: tuple[float, float]
    eigenvalues_before: tuple[float, ...]
    eigenvalues_after: tuple[float, ...]
    frame_after: Frame


@dataclass(frozen=True)
class TighteningTrace:
    steps: tuple[TighteningStep, ...]
    initial: Frame
    final: Frame
    total_deltas: np.ndarray

    @property
    def final_report(self) -> FrameReport:
        return analyze(self.final)


def _keep_going(spread: float, done: int, dim: int) -> bool:
    # a spare step cleans up a residual spread left by early cluster merging
    return spread > TIGHT_TOL or (spread > POLISH_TOL and done < dim - 1)


def tighten(F: Frame) -> TighteningTrace:
    """Perturb ``F`` into a tight frame in at most ``dim - 1`` steps.

    Step m uses ``r_m = sqrt(A_{m-1} B_{m-1})`` with the optimal bounds of the
    current frame, re-read from a fresh eigendecomposition each step.
    """
    spec = frame_spectrum(F)
    report = report_from_spectrum(spec.eigenvalues)
    current = F
    steps: list[TighteningStep] = []
    while _keep_going(report.condition_number - 1.0, len(steps), F.dim):
        if len(steps) >= F.dim - 1:
            raise NoConvergence(
                f"not tight after {len(steps)} steps (kappa - 1 = {report.condition_number - 1:.3g})"
            )
        A, B = report.lower_bound, report.upper_bound
        r = math.sqrt(A * B)
        nxt = Frame(current.vectors + r * _dual_directions(current, spec))
        spec = frame_spectrum(nxt)
        new_report = report_from_spectrum(spec.eigenvalues)
        steps.append(
            TighteningStep(
                step_index=len(steps) + 1,
                r=r,
                bounds_before=(A, B),
                bounds_after=(new_report.lower_bound, new_report.upper_bound),
                eigenvalues_before=report.eigenvalues,
                eigenvalues_after=new_report.eigenvalues,
                frame_after=nxt,
            )
        )
        current, report = nxt, new_report
    total = current.vectors - F.vectors
    total.flags.writeable = False
    return TighteningTrace(tuple(steps), F, current, total)


def stability_radius(F: Frame) -> float:
    """``sqrt(A / k)``: every perturbation with all ``||delta_j||`` below it keeps a frame."""
    return math.sqrt(analyze(F).lower_bound / len(F))


@dataclass(frozen=True)
class PWCertificate:
    lambda_const: float
    mu_crude: float
    mu_sharp: float
    admissible: bool
    guaranteed_lower: float | None
    guaranteed_upper: float
    base_report: FrameReport
    perturbed_report: FrameReport | None


def _check_same_shape(F: Frame, G: Frame) -> None:
    if F.vectors.shape != G.vectors.shape:
        raise DimensionMismatch(
            f"frames differ in shape: {len(F)}x{F.dim} vs {len(G)}x{G.dim}"
        )


def _maybe_report(G: Frame) -> FrameReport | None:
    try:
        return analyze(G)
    except NotAFrame:
        return None


def pw_check(F: Frame, G: Frame) -> PWCertificate:
    """Certify ``G`` as a frame from its distance to ``F`` (lambda = 0 form).

    With ``mu`` the spectral norm of the delta synthesis matrix,
    ``mu < sqrt(A)`` guarantees ``G`` is a frame with bounds
    ``A (1 - mu/sqrt(A))^2`` and ``B (1 + mu/sqrt(B))^2``. The upper bound
    holds regardless of admissibility.
    """
    _check_same_shape(F, G)
    base = analyze(F)
    deltas = G.vectors - F.vectors
    mu_crude = math.sqrt(len(F)) * float(np.max(np.linalg.norm(deltas, axis=1)))
    mu_sharp = operator_norm(deltas.T)
    A, B = base.lower_bound, base.upper_bound
    admissible = mu_sharp < math.sqrt(A)
    lower = A * (1.0 - mu_sharp / math.sqrt(A)) ** 2 if admissible else None
    upper = B * (1.0 + mu_sharp / math.sqrt(B)) ** 2
    return PWCertificate(0.0, mu_crude, mu_sharp, admissible, lower, upper, base, _maybe_report(G))


@dataclass(frozen=True)
class BlendResult:
    frame: Frame
    tau: float
    threshold: float
    mu: float
    certified: bool
    guaranteed_lower: float | None
    guaranteed_upper: float
    report: FrameReport | None


def blend(F: Frame, G: Frame, ts) -> BlendResult:
    """Vectorwise convex-style blend ``(1 - t_j) f_j + t_j g_j``.

    Certified a frame when ``max |t_j| < sqrt(A) / mu``. Beyond that the
    blend is still returned, uncertified, with a :class:`TauTooLarge` warning.
    """
    _check_same_shape(F, G)
    t = np.asarray(ts, dtype=float)
    if t.shape != (len(F),):
        raise DimensionMismatch(f"need {len(F)} blend coefficients, got {t.size}")
    if not np.all(np.isfinite(t)):
        raise DomainError("blend coefficients must be finite")
    base = analyze(F)
    mu = operator_norm((G.vectors - F.vectors).T)
    A, B = base.lower_bound, base.upper_bound
    tau = float(np.max(np.abs(t)))
    threshold = math.sqrt(A) / mu if mu > 0 else math.inf
    certified = tau < threshold
    blended = Frame((1.0 - t)[:, None] * F.vectors + t[:, None] * G.vectors)

    mu_eff = tau * mu
    lower = A * (1.0 - mu_eff / math.sqrt(A)) ** 2 if certified else None
    upper = B * (1.0 + mu_eff / math.sqrt(B)) ** 2
    if not certified:
        warnings.warn(
            f"max |t_j| = {tau:g} is not below sqrt(A)/mu = {threshold:g}; blend is uncertified",
            TauTooLarge,
            stacklevel=2,
        )
    return BlendResult(blended, tau, threshold, mu, certified, lower, upper, _maybe_report(blended))
