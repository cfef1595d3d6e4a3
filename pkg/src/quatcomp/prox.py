"""Proximal operators over quaternion tensors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quaternion import q_soft_threshold
from .tensor import QTensor3, TransformSpec, spectral_map


@dataclass(frozen=True)
class LogPenaltyParams:
    """Weight ``lam`` and offset ``eps`` of the penalty ``lam * log(sigma + eps)``."""

    lam: float
    eps: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")


def log_objective(a, x, params: LogPenaltyParams):
    """``0.5 (a - x)^2 + lam log(a + eps)``, the scalar problem behind :func:`log_scalar_threshold`."""
    a = np.asarray(a, dtype=float)
    return 0.5 * (a - x) ** 2 + params.lam * np.log(a + params.eps)


def log_scalar_threshold(x, params: LogPenaltyParams):
    """Minimizer over ``a >= 0`` of :func:`log_objective`, elementwise.

    The stationary points solve ``a^2 + (eps - x) a + lam - x eps = 0``.  When
    the discriminant is not positive the objective is increasing on
    ``a >= 0`` and the answer is 0; otherwise the larger root competes with
    ``a = 0`` and ties go to 0.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    lam, eps = params.lam, params.eps
    delta = (x - eps) ** 2 - 4.0 * (lam - x * eps)
    root = 0.5 * (x - eps + np.sqrt(np.maximum(delta, 0.0)))
    candidate = (delta > 0) & (root > 0)
    safe = np.where(candidate, root, 0.0)
    better = log_objective(safe, x, params) < log_objective(0.0, x, params)
    out = np.where(candidate & better, safe, 0.0)
    return float(out) if out.ndim == 0 else out


def qtsvt(X: QTensor3, tau: float, spec: TransformSpec) -> QTensor3:
    """Tensor singular value thresholding: prox of ``tau * ||.||_*``.

    Every transform-domain singular value is reduced by ``tau`` and clipped
    at zero.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    return spectral_map(X, lambda s: np.maximum(s - tau, 0.0), spec)


def qtlsvt(X: QTensor3, params: LogPenaltyParams, spec: TransformSpec) -> QTensor3:
    """Logarithmic singular value thresholding: prox of ``lam * sum log(sigma + eps)``."""
    return spectral_map(X, lambda s: log_scalar_threshold(s, params), spec)


def l1_prox(X: QTensor3, tau: float) -> QTensor3:
    """Entrywise quaternion modulus shrinkage by ``tau``."""
    return QTensor3._wrap(q_soft_threshold(X.data, tau))
