"""Low-rank quaternion tensor completion with transform-domain sparsity."""

from .errors import ConvergenceFailure, DimensionMismatch, InvalidTruncation, IterationLimit
from .media import FrameSequence, MaskSpec, assim, psnr, qtensor_to_rgb, rgb_to_qtensor, sample_mask
from .prox import LogPenaltyParams, l1_prox, log_scalar_threshold, qtlsvt, qtsvt
from .qtdct import QtdctContext, qtdct_forward, qtdct_inverse, sparsity_profile
from .quaternion import Quaternion, qmul, qsvd
from .solver import Observation, SolveReport, SolverConfig, solve
from .tensor import QTensor3, TransformSpec, qt_product, tqt_svd, tubal_spectrum

__version__ = "0.1.0"

__all__ = [
    "ConvergenceFailure",
    "DimensionMismatch",
    "FrameSequence",
    "InvalidTruncation",
    "IterationLimit",
    "LogPenaltyParams",
    "MaskSpec",
    "Observation",
    "QTensor3",
    "QtdctContext",
    "Quaternion",
    "SolveReport",
    "SolverConfig",
    "TransformSpec",
    "assim",
    "l1_prox",
    "log_scalar_threshold",
    "psnr",
    "qmul",
    "qsvd",
    "qt_product",
    "qtdct_forward",
    "qtdct_inverse",
    "qtensor_to_rgb",
    "qtlsvt",
    "qtsvt",
    "rgb_to_qtensor",
    "sample_mask",
    "solve",
    "sparsity_profile",
    "tqt_svd",
    "tubal_spectrum",
]
