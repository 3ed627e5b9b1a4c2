"""Finite frame analysis and constructive repair in R^n."""

__version__ = "0.1.0"

from .augment import AppendVerdict, ErasureVerdict, append_check, erase_check
from .diag import DiagResult, diagonalize
from .errors import (
    AllZero,
    DimensionMismatch,
    DomainError,
    EmptyInput,
    FormatError,
    FrameError,
    InvalidIndices,
    NoConvergence,
    NonSymmetric,
    NotAFrame,
    NotTight,
    SingularOperator,
    TauTooLarge,
    WrongDimension,
)
from .frame import (
    Frame,
    FrameReport,
    analyze,
    canonical_dual,
    frame_operator,
    is_frame,
    reconstruct,
    synthesis_matrix,
    tight_bound_identity,
)
from .io import parse_frame_file, write_frame
from .linalg import Spectrum, operator_norm, spd_apply_inverse, symmetric_eigen
from .perturbation import (
    BlendResult,
    ImproveResult,
    PWCertificate,
    TighteningTrace,
    blend,
    improve_step,
    pw_check,
    spectral_shift,
    stability_radius,
    tighten,
)
