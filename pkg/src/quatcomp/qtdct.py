"""Quaternion tensor discrete cosine transform.

The left-handed transform is ``u * (T x1 C1 x2 C2 x3 C3)``: an orthonormal
DCT-II along every mode followed by left multiplication with a unit pure
quaternion ``u`` (``u^2 = -1``).  Since the ``C_i`` are real they act on each
real component, and equally on each complex Cayley-Dickson part, on its own.
The default path runs the mode products on the four real components; the
Cayley-Dickson path is kept selectable as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import quaternion as qt
from .errors import DimensionMismatch
from .tensor import QTensor3, dct_matrix

GRAY_AXIS = np.array([0.0, 1.0, 1.0, 1.0]) / np.sqrt(3.0)


@dataclass(frozen=True)
class QtdctContext:
    """DCT matrices for each mode plus the unit pure quaternion ``u``."""

    dims: tuple[int, int, int]
    u: np.ndarray = field(default_factory=lambda: GRAY_AXIS.copy())
    mats: tuple[np.ndarray, np.ndarray, np.ndarray] = field(init=False, repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or min(dims) < 1:
            raise DimensionMismatch(f"dims must be three positive integers, got {self.dims}")
        u = np.asarray(self.u, dtype=float).reshape(4)
        if abs(u[0]) > 1e-12 or abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise ValueError(f"u must be a unit pure quaternion, got {u}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "mats", tuple(dct_matrix(n) for n in dims))

    @classmethod
    def for_tensor(cls, T: QTensor3, u=None) -> "QtdctContext":
        return cls(T.shape) if u is None else cls(T.shape, u)


def _check(T: QTensor3, ctx: QtdctContext) -> None:
    if T.shape != ctx.dims:
        raise DimensionMismatch(f"tensor {T.shape} does not match context {ctx.dims}")


def _dct3(x: np.ndarray, mats, transpose: bool) -> np.ndarray:
    # x is slice-major (I3, I1, I2); mode 1 -> axis 1, mode 2 -> axis 2, mode 3 -> axis 0
    c1, c2, c3 = (m.T for m in mats) if transpose else mats
    x = np.einsum("ai,kib->kab", c1, x)
    x = np.einsum("bj,kaj->kab", c2, x)
    return np.einsum("lk,kab->lab", c3, x)


def _dct3_real(x: np.ndarray, mats, transpose: bool) -> np.ndarray:
    # x is (I3, I1, I2, 4); plain BLAS products on the real components
    c1, c2, c3 = (m.T for m in mats) if transpose else mats
    i3, i1, i2, _ = x.shape
    x = np.matmul(c1, x.reshape(i3, i1, i2 * 4)).reshape(i3, i1, i2, 4)
    x = np.matmul(x.transpose(0, 1, 3, 2), c2.T).transpose(0, 1, 3, 2)
    return (c3 @ x.reshape(i3, -1)).reshape(i3, i1, i2, 4)


def _mode_products(T: QTensor3, ctx: QtdctContext, transpose: bool, cayley_dickson: bool = False) -> QTensor3:
    if cayley_dickson:
        p, q = T.cayley_dickson()
        return QTensor3.from_cayley_dickson(_dct3(p, ctx.mats, transpose), _dct3(q, ctx.mats, transpose))
    return QTensor3._wrap(_dct3_real(T.data, ctx.mats, transpose))


def qtdct_forward(T: QTensor3, ctx: QtdctContext, *, cayley_dickson: bool = False) -> QTensor3:
    _check(T, ctx)
    return QTensor3._wrap(qt.qmul(ctx.u, _mode_products(T, ctx, False, cayley_dickson).data))


def qtdct_inverse(S: QTensor3, ctx: QtdctContext, *, cayley_dickson: bool = False) -> QTensor3:
    """Undo :func:`qtdct_forward`: left-multiply by ``u^{-1} = -u``, then ``C_i^T``."""
    _check(S, ctx)
    unwound = QTensor3._wrap(qt.qmul(-ctx.u, S.data))
    return _mode_products(unwound, ctx, True, cayley_dickson)


def qtdct_forward_right(T: QTensor3, ctx: QtdctContext) -> QTensor3:
    """Right-handed variant ``(T x1 C1 x2 C2 x3 C3) * u``; not used by the solver."""
    _check(T, ctx)
    return QTensor3._wrap(qt.qmul(_mode_products(T, ctx, False).data, ctx.u))


def qtdct_inverse_right(S: QTensor3, ctx: QtdctContext) -> QTensor3:
    _check(S, ctx)
    unwound = QTensor3._wrap(qt.qmul(S.data, -ctx.u))
    return _mode_products(unwound, ctx, True)


@dataclass(frozen=True)
class SparsityProfile:
    """Histogram of entry moduli.

    The first bin is ``[0, rel_floor * max]``; the remaining bins split
    ``[rel_floor * max, max]`` on a log scale.
    """

    edges: np.ndarray
    counts: np.ndarray
    sparsity: float  # fraction of entries with modulus <= rel_floor * max

    def cumulative_fraction(self) -> np.ndarray:
        total = self.counts.sum()
        return np.cumsum(self.counts) / total if total else np.zeros(len(self.counts))


def sparsity_profile(S: QTensor3, bins: int = 50, rel_floor: float = 1e-3) -> SparsityProfile:
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    mod = S.modulus().ravel()
    top = float(mod.max()) if mod.size else 0.0
    if top == 0.0:
        counts = np.zeros(bins, dtype=np.int64)
        counts[0] = mod.size
        return SparsityProfile(np.zeros(bins + 1), counts, 1.0)
    floor = rel_floor * top
    edges = np.concatenate([[0.0], np.geomspace(floor, top, bins)])
    counts, _ = np.histogram(mod, bins=edges)
    # np.histogram puts values equal to an inner edge in the upper bin; move
    # exact hits on the floor back into the zero bin
    on_floor = int(np.count_nonzero(mod == floor))
    counts[0] += on_floor
    counts[1] -= on_floor
    sparsity = float(np.count_nonzero(mod <= floor)) / mod.size
    return SparsityProfile(edges, counts.astype(np.int64), sparsity)
