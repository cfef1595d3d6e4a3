"""Quaternion scalars and matrices.

Quaternion arrays are plain float64 numpy arrays whose trailing axis holds
the four components ``(w, x, y, z)`` of ``w + x i + y j + z k``.  A quaternion
matrix is therefore an ``(M, N, 4)`` array; leading batch axes broadcast in
every function below.

Products go through the Cayley-Dickson split ``q = p + q' j`` with complex
``p = w + x i`` and ``q' = y + z i``, which turns quaternion matrix algebra
into a handful of complex matmuls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

import scipy.linalg

from .errors import ConvergenceFailure, DimensionMismatch

# sigma_i counts toward the rank when sigma_i > RANK_RTOL * sigma_1
RANK_RTOL = 1e-10

# singular values of the complex adjoint closer than this (relative to
# sigma_1) are treated as one cluster when building quaternion vectors
_CLUSTER_RTOL = 1e-11


@dataclass(frozen=True)
class Quaternion:
    """A single quaternion ``w + x i + y j + z k``."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        w, x, y, z = (float(v) for v in np.asarray(a, dtype=float).reshape(4))
        return cls(w, x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def __abs__(self) -> float:
        return float(qabs(self.as_array()))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.as_array() + other.as_array())

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.as_array() - other.as_array())

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(qmul(self.as_array(), other.as_array()))
        return Quaternion.from_array(self.as_array() * float(other))

    __rmul__ = __mul__


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def _check_quat(a: np.ndarray, name: str = "array") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape[-1:] != (4,):
        raise DimensionMismatch(f"{name} must have a trailing axis of length 4, got {a.shape}")
    return a


def qmul(p, q) -> np.ndarray:
    """Hamilton product of quaternion arrays, broadcasting over leading axes."""
    p = _check_quat(p, "p")
    q = _check_quat(q, "q")
    p0, p1, p2, p3 = np.moveaxis(p, -1, 0)
    q0, q1, q2, q3 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
            p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
            p0 * q2 - p1 * q3 + p2 * q0 + p3 * q1,
            p0 * q3 + p1 * q2 - p2 * q1 + p3 * q0,
        ],
        axis=-1,
    )


def qconj(q) -> np.ndarray:
    q = _check_quat(q)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def qabs(q) -> np.ndarray:
    """Entrywise modulus.

    Nested ``hypot`` avoids the underflow of summing squares, so the result
    is zero only for the zero quaternion.
    """
    q = _check_quat(q)
    return np.hypot(np.hypot(q[..., 0], q[..., 1]), np.hypot(q[..., 2], q[..., 3]))


def to_cayley_dickson(Q) -> tuple[np.ndarray, np.ndarray]:
    """Split ``Q = Qp + Qq j`` into complex parts ``Qp = Q0 + Q1 i``, ``Qq = Q2 + Q3 i``."""
    Q = _check_quat(Q)
    return Q[..., 0] + 1j * Q[..., 1], Q[..., 2] + 1j * Q[..., 3]


def from_cayley_dickson(p, q) -> np.ndarray:
    p = np.asarray(p)
    q = np.asarray(q)
    return np.stack([p.real, p.imag, q.real, q.imag], axis=-1)


def complex_adjoint(Q) -> np.ndarray:
    """Complex adjoint ``[[Qp, Qq], [-conj(Qq), conj(Qp)]]`` of shape ``(..., 2M, 2N)``."""
    p, q = to_cayley_dickson(Q)
    top = np.concatenate([p, q], axis=-1)
    bottom = np.concatenate([-q.conj(), p.conj()], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def from_complex_adjoint(C) -> np.ndarray:
    """Inverse of :func:`complex_adjoint`.

    The two copies of each block are averaged, so a matrix that only
    approximately has adjoint structure is projected onto it.
    """
    C = np.asarray(C)
    m2, n2 = C.shape[-2:]
    if m2 % 2 or n2 % 2:
        raise DimensionMismatch(f"complex adjoint must have even dimensions, got {C.shape}")
    m, n = m2 // 2, n2 // 2
    p = 0.5 * (C[..., :m, :n] + C[..., m:, n:].conj())
    q = 0.5 * (C[..., :m, n:] - C[..., m:, :n].conj())
    return from_cayley_dickson(p, q)


def qmatmul(A, B) -> np.ndarray:
    """Quaternion matrix product ``A @ B`` (batched over leading axes)."""
    A = _check_quat(A, "A")
    B = _check_quat(B, "B")
    if A.ndim < 3 or B.ndim < 3 or A.shape[-2] != B.shape[-3]:
        raise DimensionMismatch(f"cannot multiply quaternion matrices {A.shape[:-1]} and {B.shape[:-1]}")
    ap, aq = to_cayley_dickson(A)
    bp, bq = to_cayley_dickson(B)
    # (ap + aq j)(bp + bq j) = (ap bp - aq conj(bq)) + (ap bq + aq conj(bp)) j
    p = ap @ bp - aq @ bq.conj()
    q = ap @ bq + aq @ bp.conj()
    return from_cayley_dickson(p, q)


def qhermitian(A) -> np.ndarray:
    """Conjugate transpose of a (batched) quaternion matrix."""
    A = _check_quat(A)
    return qconj(np.swapaxes(A, -3, -2))


def qeye(n: int) -> np.ndarray:
    out = np.zeros((n, n, 4))
    out[np.arange(n), np.arange(n), 0] = 1.0
    return out


def frobenius_norm(Q) -> float:
    Q = _check_quat(Q)
    return float(np.sqrt(np.sum(Q * Q)))


def l1_norm(Q) -> float:
    return float(np.sum(qabs(Q)))


def qtrace(Q) -> np.ndarray:
    """Quaternion trace (sum of the diagonal) of the last two matrix axes."""
    Q = _check_quat(Q)
    k = min(Q.shape[-3], Q.shape[-2])
    return np.einsum("...iic->...c", Q[..., :k, :k, :])


def q_soft_threshold(q, tau: float) -> np.ndarray:
    """Modulus shrinkage ``max(|q| - tau, 0) q / |q|``, entrywise.

    Proximal map of ``tau * |.|`` on quaternions; the direction of each entry
    is preserved and entries with ``|q| <= tau`` go to zero.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    q = _check_quat(q)
    mod = qabs(q)
    scale = np.zeros_like(mod)
    keep = mod > tau
    scale[keep] = (mod[keep] - tau) / mod[keep]
    return q * scale[..., None]


def numerical_rank(sigma, rtol: float = RANK_RTOL) -> int:
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0 or sigma.max() <= 0:
        return 0
    return int(np.count_nonzero(sigma > rtol * sigma.max()))


def nuclear_norm(Q) -> float:
    return float(np.sum(qsingular_values(Q)))


def qsingular_values(Q) -> np.ndarray:
    """Quaternion singular values (batched), descending.

    Uses the fact that every singular value of the complex adjoint occurs
    twice; each pair is averaged into one representative.
    """
    Q = _check_quat(Q)
    k = min(Q.shape[-3], Q.shape[-2])
    s = complex_svd(complex_adjoint(Q), compute_uv=False)
    return 0.5 * (s[..., 0 : 2 * k : 2] + s[..., 1 : 2 * k : 2])


def complex_svd(a: np.ndarray, full_matrices: bool = False, compute_uv: bool = True):
    """Batched complex SVD with a fallback LAPACK driver.

    The divide-and-conquer driver used by numpy occasionally fails on
    perfectly finite input; those batches are redone one matrix at a time
    with the QR-iteration driver ``gesvd``.
    """
    try:
        return np.linalg.svd(a, full_matrices=full_matrices, compute_uv=compute_uv)
    except np.linalg.LinAlgError:
        pass
    flat = a.reshape((-1,) + a.shape[-2:])
    try:
        parts = [
            scipy.linalg.svd(m, full_matrices=full_matrices, compute_uv=compute_uv, lapack_driver="gesvd")
            for m in flat
        ]
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceFailure(f"SVD did not converge: {exc}") from exc
    lead = a.shape[:-2]
    if not compute_uv:
        return np.stack(parts).reshape(lead + parts[0].shape)
    return tuple(np.stack([p[i] for p in parts]).reshape(lead + parts[0][i].shape) for i in range(3))


def _partner(x: np.ndarray) -> np.ndarray:
    # columns [up; -conj(uq)] and [uq; conj(up)] of the adjoint of a
    # quaternion vector come together; this maps the first to the second
    h = x.shape[0] // 2
    return np.concatenate([-x[h:].conj(), x[:h].conj()])


def _symplectic_pick(cols: np.ndarray, m: int, basis: list[np.ndarray]) -> list[np.ndarray]:
    """Pick ``m`` complex vectors from the span of ``cols`` that are orthonormal
    together with their partners and with everything already in ``basis``.

    Column-pivoted, so an arbitrary LAPACK basis of a repeated singular
    subspace still yields valid quaternion vectors.
    """
    picked = []
    work = cols.copy()
    for _ in range(m):
        for b in basis:
            work -= np.outer(b, b.conj() @ work)
        norms = np.linalg.norm(work, axis=0)
        x = work[:, int(np.argmax(norms))].copy()
        for _ in range(2):
            for b in basis:
                x -= b * (b.conj() @ x)
            x /= np.linalg.norm(x)
        picked.append(x)
        basis.append(x)
        basis.append(_partner(x))
    return picked


def _vectors_to_qmatrix(xs: list[np.ndarray], rows: int) -> np.ndarray:
    X = np.stack(xs, axis=1) if xs else np.zeros((2 * rows, 0), dtype=complex)
    return from_cayley_dickson(X[:rows], -X[rows:].conj())


def _phase_of_largest(col: np.ndarray) -> np.ndarray:
    mod = qabs(col)
    g = col[int(np.argmax(mod))]
    n = np.sqrt(np.sum(g * g))
    return g / n if n > 0 else np.array([1.0, 0.0, 0.0, 0.0])


def qsvd(Q) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full quaternion SVD ``Q = U diag(sigma) V^H``.

    Returns ``U`` (M, M, 4), ``sigma`` of length min(M, N) in descending order
    and ``V`` (N, N, 4).  Each left singular vector is right-multiplied by a
    unit quaternion so that its largest-modulus entry is real and positive;
    the matching right vector gets the same factor.

    Raises ConvergenceFailure if LAPACK does not converge.
    """
    Q = _check_quat(Q, "Q")
    if Q.ndim != 3:
        raise DimensionMismatch(f"qsvd expects a single (M, N, 4) matrix, got {Q.shape}")
    M, N = Q.shape[:2]
    k = min(M, N)
    chi = complex_adjoint(Q)
    u, s, vh = complex_svd(chi, full_matrices=True)
    v = vh.conj().T
    sigma = 0.5 * (s[0 : 2 * k : 2] + s[1 : 2 * k : 2])

    smax = sigma[0] if k else 0.0
    null_tol = RANK_RTOL * smax
    live = [i for i in range(k) if sigma[i] > null_tol]

    # group the live quaternion singular values into clusters of repeats
    clusters: list[list[int]] = []
    for i in live:
        if clusters and sigma[clusters[-1][-1]] - sigma[i] <= _CLUSTER_RTOL * smax:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    u_basis: list[np.ndarray] = []
    v_basis: list[np.ndarray] = []
    u_cols: list[np.ndarray] = []
    v_cols: list[np.ndarray] = []
    for cl in clusters:
        idx = np.arange(2 * cl[0], 2 * cl[-1] + 2)
        if len(cl) == 1:
            # LAPACK's own (u, v) pair is consistent; keep it as is
            x, y = u[:, idx[0]], v[:, idx[0]]
            for basis, vec, out in ((u_basis, x, u_cols), (v_basis, y, v_cols)):
                out.append(vec)
                basis.extend([vec, _partner(vec)])
        else:
            xs = _symplectic_pick(u[:, idx], len(cl), u_basis)
            u_cols.extend(xs)
            for x, i in zip(xs, cl):
                y = chi.conj().T @ x / sigma[i]
                y /= np.linalg.norm(y)
                v_cols.append(y)
                v_basis.extend([y, _partner(y)])

    # null spaces: singular values at or below the rank cutoff, plus the
    # extra columns of the taller side
    nl = len(live)
    u_cols += _symplectic_pick(u[:, 2 * nl :], M - nl, u_basis) if M > nl else []
    v_cols += _symplectic_pick(v[:, 2 * nl :], N - nl, v_basis) if N > nl else []

    U = _vectors_to_qmatrix(u_cols, M)
    V = _vectors_to_qmatrix(v_cols, N)

    for i in range(M):
        g = qconj(_phase_of_largest(U[:, i]))
        U[:, i] = qmul(U[:, i], g)
        if i < k:
            V[:, i] = qmul(V[:, i], g)
    for i in range(k, N):
        V[:, i] = qmul(V[:, i], qconj(_phase_of_largest(V[:, i])))
    return U, sigma, V


def sigma_matrix(sigma, shape: tuple[int, int]) -> np.ndarray:
    """Real rectangular diagonal quaternion matrix holding ``sigma``."""
    out = np.zeros(shape + (4,))
    k = len(sigma)
    out[np.arange(k), np.arange(k), 0] = sigma
    return out
