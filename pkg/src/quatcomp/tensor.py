"""Third-order quaternion tensors and the transform-based t-product algebra.

A :class:`QTensor3` of dims ``(I1, I2, I3)`` stores its entries frontal-slice
first, as a read-only float64 array of shape ``(I3, I1, I2, 4)``, so slice
``k`` is a contiguous ``(I1, I2, 4)`` quaternion matrix and per-slice work
batches directly over the leading axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import quaternion as qt
from .errors import DimensionMismatch, InvalidTruncation


class QTensor3:
    """Immutable ``I1 x I2 x I3`` quaternion tensor."""

    __slots__ = ("data",)

    def __init__(self, slices, *, copy: bool = True):
        data = np.array(slices, dtype=float, copy=copy or None)
        if data.ndim != 4 or data.shape[-1] != 4:
            raise DimensionMismatch(f"expected slice-major array (I3, I1, I2, 4), got {data.shape}")
        data = np.ascontiguousarray(data)
        data.flags.writeable = False
        self.data = data

    @classmethod
    def _wrap(cls, data: np.ndarray) -> "QTensor3":
        # no-copy constructor for arrays freshly allocated inside the package
        return cls(data, copy=False)

    @classmethod
    def from_components(cls, arr) -> "QTensor3":
        """Build from an ``(I1, I2, I3, 4)`` array indexed like the math."""
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 4 or arr.shape[-1] != 4:
            raise DimensionMismatch(f"expected (I1, I2, I3, 4), got {arr.shape}")
        return cls._wrap(np.ascontiguousarray(np.moveaxis(arr, 2, 0)))

    @classmethod
    def from_parts(cls, w=None, x=None, y=None, z=None) -> "QTensor3":
        """Build from real ``(I1, I2, I3)`` component arrays; missing parts are zero."""
        given = [a for a in (w, x, y, z) if a is not None]
        if not given:
            raise ValueError("at least one component is required")
        shape = np.shape(given[0])
        parts = [np.zeros(shape) if a is None else np.asarray(a, dtype=float) for a in (w, x, y, z)]
        return cls.from_components(np.stack(parts, axis=-1))

    @classmethod
    def zeros(cls, dims) -> "QTensor3":
        i1, i2, i3 = dims
        return cls._wrap(np.zeros((i3, i1, i2, 4)))

    @classmethod
    def from_slices(cls, slices) -> "QTensor3":
        """Stack a sequence of ``(I1, I2, 4)`` quaternion matrices as frontal slices."""
        return cls._wrap(np.stack([np.asarray(s, dtype=float) for s in slices]))

    @property
    def shape(self) -> tuple[int, int, int]:
        i3, i1, i2, _ = self.data.shape
        return i1, i2, i3

    def components(self) -> np.ndarray:
        """``(I1, I2, I3, 4)`` view of the entries."""
        return np.moveaxis(self.data, 0, 2)

    def frontal(self, k: int) -> np.ndarray:
        return self.data[k]

    @property
    def real(self) -> np.ndarray:
        return np.moveaxis(self.data[..., 0], 0, 2)

    def is_pure(self) -> bool:
        return not np.any(self.data[..., 0])

    def modulus(self) -> np.ndarray:
        """Entrywise modulus as an ``(I1, I2, I3)`` array."""
        return np.moveaxis(qt.qabs(self.data), 0, 2)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.data * self.data)))

    def hermitian(self) -> "QTensor3":
        """Facewise conjugate transpose, the adjoint under any real mode-3 transform."""
        return QTensor3._wrap(qt.qhermitian(self.data))

    def cayley_dickson(self) -> tuple[np.ndarray, np.ndarray]:
        """Complex parts ``(Tp, Tq)`` in slice-major layout ``(I3, I1, I2)``."""
        return qt.to_cayley_dickson(self.data)

    @classmethod
    def from_cayley_dickson(cls, p, q) -> "QTensor3":
        return cls._wrap(qt.from_cayley_dickson(p, q))

    def mask(self, keep) -> "QTensor3":
        """Zero every entry where the ``(I1, I2, I3)`` boolean ``keep`` is False."""
        keep = np.asarray(keep, dtype=bool)
        if keep.shape != self.shape:
            raise DimensionMismatch(f"mask {keep.shape} does not match tensor {self.shape}")
        return QTensor3._wrap(self.data * np.moveaxis(keep, 2, 0)[..., None])

    def where(self, keep, other: "QTensor3") -> "QTensor3":
        """Entries of ``self`` where ``keep`` is True, entries of ``other`` elsewhere."""
        keep = np.asarray(keep, dtype=bool)
        _same_dims(self, other)
        if keep.shape != self.shape:
            raise DimensionMismatch(f"mask {keep.shape} does not match tensor {self.shape}")
        return QTensor3._wrap(np.where(np.moveaxis(keep, 2, 0)[..., None], self.data, other.data))

    def __add__(self, other: "QTensor3") -> "QTensor3":
        _same_dims(self, other)
        return QTensor3._wrap(self.data + other.data)

    def __sub__(self, other: "QTensor3") -> "QTensor3":
        _same_dims(self, other)
        return QTensor3._wrap(self.data - other.data)

    def __neg__(self) -> "QTensor3":
        return QTensor3._wrap(-self.data)

    def __mul__(self, alpha: float) -> "QTensor3":
        return QTensor3._wrap(self.data * float(alpha))

    __rmul__ = __mul__

    def __truediv__(self, alpha: float) -> "QTensor3":
        return QTensor3._wrap(self.data / float(alpha))

    def __eq__(self, other) -> bool:
        return isinstance(other, QTensor3) and np.array_equal(self.data, other.data)

    __hash__ = None

    def __repr__(self) -> str:
        return f"QTensor3(shape={self.shape}, norm={self.norm():.6g})"


def _same_dims(a: QTensor3, b: QTensor3) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"tensor dims differ: {a.shape} vs {b.shape}")


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix ``C`` with ``C @ x`` the transform of ``x``."""
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    c = np.cos(np.pi * (2 * i + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
    c[0] /= np.sqrt(2.0)
    return c


@dataclass(frozen=True)
class TransformSpec:
    """Invertible real mode-3 transform and its inverse."""

    matrix: np.ndarray
    inverse: np.ndarray = field(repr=False)
    name: str = "custom"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        inv = np.array(self.inverse, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or inv.shape != m.shape:
            raise DimensionMismatch(f"transform must be square with a matching inverse, got {m.shape}, {inv.shape}")
        m.flags.writeable = False
        inv.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "inverse", inv)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def dct(cls, n: int) -> "TransformSpec":
        c = dct_matrix(n)
        return cls(c, c.T, "dct2")

    @classmethod
    def identity(cls, n: int) -> "TransformSpec":
        return cls(np.eye(n), np.eye(n), "identity")

    @classmethod
    def from_matrix(cls, m, name: str = "custom") -> "TransformSpec":
        m = np.asarray(m, dtype=float)
        return cls(m, np.linalg.inv(m), name)

    def is_orthonormal(self, tol: float = 1e-10) -> bool:
        n = self.size
        return bool(np.linalg.norm(self.matrix @ self.matrix.T - np.eye(n)) <= tol * np.sqrt(n))


def mode3_transform(T: QTensor3, spec: TransformSpec, inverse: bool = False) -> QTensor3:
    """``T x_3 Q3`` (or ``T x_3 Q3^{-1}`` when ``inverse``): every tube times the matrix."""
    if spec.size != T.shape[2]:
        raise DimensionMismatch(f"transform size {spec.size} does not match I3={T.shape[2]}")
    m = spec.inverse if inverse else spec.matrix
    return QTensor3._wrap(np.tensordot(m, T.data, axes=(1, 0)))


def facewise_product(A: QTensor3, B: QTensor3) -> QTensor3:
    """Slice-by-slice quaternion matrix product."""
    _, inner, a3 = A.shape
    inner_b, _, b3 = B.shape
    if inner != inner_b or a3 != b3:
        raise DimensionMismatch(f"cannot take facewise product of {A.shape} and {B.shape}")
    return QTensor3._wrap(qt.qmatmul(A.data, B.data))


def qt_product(A: QTensor3, B: QTensor3, spec: TransformSpec) -> QTensor3:
    """Transform-domain product ``L^{-1}(L(A) *_F L(B))``."""
    return mode3_transform(
        facewise_product(mode3_transform(A, spec), mode3_transform(B, spec)), spec, inverse=True
    )


def identity_tensor(n: int, i3: int, spec: TransformSpec) -> QTensor3:
    """Unit of ``qt_product``: identity matrices on every transform-domain slice."""
    eye = QTensor3._wrap(np.broadcast_to(qt.qeye(n), (i3, n, n, 4)).copy())
    return mode3_transform(eye, spec, inverse=True)


def tqt_svd(T: QTensor3, spec: TransformSpec) -> tuple[QTensor3, QTensor3, QTensor3]:
    """Transform-based tensor SVD ``T = U * D * V^H``.

    Each transform-domain frontal slice is factored by :func:`qsvd`, and the
    three factor tensors are mapped back with the inverse transform.  In the
    transform domain ``D`` is real, nonnegative and diagonal.
    """
    i1, i2, i3 = T.shape
    That = mode3_transform(T, spec)
    us, ds, vs = [], [], []
    for k in range(i3):
        u, s, v = qt.qsvd(That.frontal(k))
        us.append(u)
        ds.append(qt.sigma_matrix(s, (i1, i2)))
        vs.append(v)
    inv = lambda xs: mode3_transform(QTensor3.from_slices(xs), spec, inverse=True)  # noqa: E731
    return inv(us), inv(ds), inv(vs)


@dataclass(frozen=True)
class TubalSpectrum:
    """Per-slice singular values: column ``k`` belongs to transform-domain slice ``k``."""

    values: np.ndarray  # (min(I1, I2), I3)

    def rank(self, rtol: float = qt.RANK_RTOL) -> int:
        """Tubal rank: the largest per-slice count of values above ``rtol * max``."""
        top = self.values.max() if self.values.size else 0.0
        if top <= 0:
            return 0
        return int(np.max(np.count_nonzero(self.values > rtol * top, axis=0)))

    def sum_squares(self) -> float:
        return float(np.sum(self.values**2))


def transform_singular_values(That: QTensor3) -> np.ndarray:
    """Singular values of every frontal slice of an already transformed tensor, ``(I3, K)``."""
    return qt.qsingular_values(That.data)


def tubal_spectrum(T: QTensor3, spec: TransformSpec) -> TubalSpectrum:
    return TubalSpectrum(transform_singular_values(mode3_transform(T, spec)).T.copy())


def qtnn(spectrum: TubalSpectrum) -> float:
    """Tensor nuclear norm: every transform-domain singular value summed."""
    return float(np.sum(spectrum.values))


def rank_surrogates(spectrum: TubalSpectrum, r: int, p: float = 1.0, eps: float = 1.0) -> dict[str, float]:
    """Nuclear, truncated nuclear and logarithmic norms of a tubal spectrum.

    ``qt_rnn`` drops the ``r`` largest singular values of every slice;
    ``qtln`` is ``sum(log(sigma**p + eps))`` over all entries.
    """
    kmax = spectrum.values.shape[0]
    if not 0 <= r < kmax:
        raise InvalidTruncation(f"r={r} must satisfy 0 <= r < min(I1, I2) = {kmax}")
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    vals = spectrum.values
    return {
        "qtnn": float(np.sum(vals)),
        "qt_rnn": float(np.sum(vals[r:])),
        "qtln": float(np.sum(np.log(vals**p + eps))),
    }


def spectral_map(T: QTensor3, fn, spec: TransformSpec, return_values: bool = False):
    """Apply ``fn`` to every transform-domain singular value and recompose.

    Equivalent to ``U * fn(D) * V^H`` from :func:`tqt_svd`, but evaluated on
    the complex adjoint of each slice: adjoint singular values come in equal
    pairs, so mapping both members of each pair by ``fn`` yields exactly the
    adjoint of the quaternion result.  ``fn`` takes and returns an array of
    shape ``(I3, K)`` and must send 0 to 0.  With ``return_values`` the
    mapped singular values are returned alongside the tensor.
    """
    That = mode3_transform(T, spec)
    i1, i2, _ = T.shape
    k = min(i1, i2)
    chi = qt.complex_adjoint(That.data)
    u, s, vh = qt.complex_svd(chi)
    paired = 0.5 * (s[:, 0 : 2 * k : 2] + s[:, 1 : 2 * k : 2])
    values = np.asarray(fn(paired), dtype=float)
    mapped = np.repeat(values, 2, axis=1)
    rec = (u[:, :, : 2 * k] * mapped[:, None, :]) @ vh[:, : 2 * k, :]
    out = mode3_transform(QTensor3._wrap(qt.from_complex_adjoint(rec)), spec, inverse=True)
    return (out, values) if return_values else out
