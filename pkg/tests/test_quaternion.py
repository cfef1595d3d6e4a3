import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_quat, rel
from quatcomp import quaternion as qt
from quatcomp.errors import DimensionMismatch
from quatcomp.quaternion import I, J, K, ONE, Quaternion

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
quats = arrays(np.float64, 4, elements=finite)


def left_matrix(p):
    # real 4x4 matrix of q -> p q, written out from the multiplication table
    w, x, y, z = p
    return np.array(
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ]
    )


def adjoint_oracle(Q):
    # 2M x 2N complex adjoint built entry by entry
    M, N = Q.shape[:2]
    out = np.zeros((2 * M, 2 * N), dtype=complex)
    for a in range(M):
        for b in range(N):
            w, x, y, z = Q[a, b]
            p, q = complex(w, x), complex(y, z)
            out[a, b] = p
            out[a, N + b] = q
            out[M + a, b] = -q.conjugate()
            out[M + a, N + b] = p.conjugate()
    return out


def qmatmul_oracle(A, B):
    M, L = A.shape[:2]
    N = B.shape[1]
    out = np.zeros((M, N, 4))
    for a in range(M):
        for b in range(N):
            for c in range(L):
                out[a, b] += left_matrix(A[a, c]) @ B[c, b]
    return out


def test_unit_products_exact():
    assert I * J == K
    assert J * K == I
    assert K * I == J
    assert J * I == -K
    assert I * I == -ONE
    assert I * J * K == -ONE


def test_identity_element(rng):
    q = random_quat(rng, (20,))
    assert np.array_equal(qt.qmul(ONE.as_array(), q), q)
    assert np.array_equal(qt.qmul(q, ONE.as_array()), q)


def test_qmul_matches_multiplication_table(rng):
    p = random_quat(rng, (50,))
    q = random_quat(rng, (50,))
    expect = np.einsum("nij,nj->ni", np.stack([left_matrix(a) for a in p]), q)
    assert np.allclose(qt.qmul(p, q), expect, rtol=0, atol=1e-13)


def test_qmul_broadcasts(rng):
    p = random_quat(rng)
    q = random_quat(rng, (3, 5))
    out = qt.qmul(p, q)
    assert out.shape == (3, 5, 4)
    assert np.allclose(out[1, 2], qt.qmul(p, q[1, 2]))


def test_not_commutative(rng):
    p, q = random_quat(rng), random_quat(rng)
    assert not np.allclose(qt.qmul(p, q), qt.qmul(q, p))


def test_adjoint_homomorphism_scalars(rng):
    p = random_quat(rng, (1, 1))
    q = random_quat(rng, (1, 1))
    lhs = qt.complex_adjoint(qt.qmatmul(p, q))
    rhs = qt.complex_adjoint(p) @ qt.complex_adjoint(q)
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-12)


def test_complex_adjoint_of_j():
    Q = np.array([[J.as_array()]])
    assert np.array_equal(qt.complex_adjoint(Q), np.array([[0, 1], [-1, 0]], dtype=complex))


def test_complex_adjoint_real_matrix_block_diagonal(rng):
    R = rng.normal(size=(3, 4))
    Q = np.zeros((3, 4, 4))
    Q[..., 0] = R
    chi = qt.complex_adjoint(Q)
    assert np.array_equal(chi[:3, :4], R)
    assert np.array_equal(chi[3:, 4:], R)
    assert not chi[:3, 4:].any() and not chi[3:, :4].any()


def test_complex_adjoint_matches_oracle_and_norm(rng):
    Q = random_quat(rng, (5, 3))
    chi = qt.complex_adjoint(Q)
    assert np.array_equal(chi, adjoint_oracle(Q))
    assert np.isclose(np.linalg.norm(chi), np.sqrt(2) * qt.frobenius_norm(Q), rtol=1e-14)
    assert np.array_equal(qt.from_complex_adjoint(chi), Q)


def test_cayley_dickson_round_trip(rng):
    Q = random_quat(rng, (4, 6))
    p, q = qt.to_cayley_dickson(Q)
    assert np.array_equal(qt.from_cayley_dickson(p, q), Q)


def test_qmatmul_against_loop_oracle(rng):
    A = random_quat(rng, (4, 3))
    B = random_quat(rng, (3, 5))
    assert np.allclose(qt.qmatmul(A, B), qmatmul_oracle(A, B), rtol=0, atol=1e-12)


def test_qmatmul_dimension_mismatch(rng):
    with pytest.raises(DimensionMismatch):
        qt.qmatmul(random_quat(rng, (2, 3)), random_quat(rng, (2, 3)))


def test_matrix_adjoint_homomorphism(rng):
    A = random_quat(rng, (6, 4))
    B = random_quat(rng, (4, 5))
    lhs = qt.complex_adjoint(qt.qmatmul(A, B))
    rhs = qt.complex_adjoint(A) @ qt.complex_adjoint(B)
    assert np.abs(lhs - rhs).max() <= 1e-10


def test_frobenius_equals_trace_form(rng):
    Q = random_quat(rng, (5, 4))
    tr = qt.qtrace(qt.qmatmul(qt.qhermitian(Q), Q))
    assert np.isclose(qt.frobenius_norm(Q), np.sqrt(tr[0]), rtol=1e-12)
    assert abs(tr[1:]).max() <= 1e-12 * tr[0]


def test_l1_norm(rng):
    Q = random_quat(rng, (3, 3))
    assert np.isclose(qt.l1_norm(Q), sum(np.linalg.norm(Q[a, b]) for a in range(3) for b in range(3)))


def test_quaternion_dataclass():
    q = Quaternion(1.0, -2.0, 3.0, 0.5)
    assert abs(q) == pytest.approx(np.sqrt(1 + 4 + 9 + 0.25))
    assert q.conjugate() == Quaternion(1.0, 2.0, -3.0, -0.5)
    assert 2 * q == q * 2 == Quaternion(2.0, -4.0, 6.0, 1.0)
    assert q - q == Quaternion()
    assert Quaternion.from_array(q.as_array()) == q


@given(quats)
def test_conjugate_product_is_squared_modulus(a):
    q = Quaternion.from_array(a)
    prod = (q.conjugate() * q).as_array()
    n2 = float(np.dot(a, a))
    assert abs(prod[0] - n2) <= 1e-12 * max(n2, 1.0)
    assert np.abs(prod[1:]).max() <= 1e-12 * max(n2, 1.0)


@given(quats, quats, quats)
def test_associative_and_distributive(a, b, c):
    scale = max(1.0, np.linalg.norm(a) * np.linalg.norm(b) * np.linalg.norm(c))
    lhs = qt.qmul(qt.qmul(a, b), c)
    rhs = qt.qmul(a, qt.qmul(b, c))
    assert np.abs(lhs - rhs).max() <= 1e-12 * scale
    scale2 = max(1.0, np.linalg.norm(a) * (np.linalg.norm(b) + np.linalg.norm(c)))
    assert np.abs(qt.qmul(a, b + c) - qt.qmul(a, b) - qt.qmul(a, c)).max() <= 1e-12 * scale2


@given(quats)
def test_modulus_zero_iff_zero(a):
    assert (qt.qabs(a) == 0) == (not a.any())


# --- soft thresholding


def test_soft_threshold_examples():
    q = np.array([0.0, 3.0, 4.0, 0.0])
    out = qt.q_soft_threshold(q, 2.0)
    assert np.isclose(qt.qabs(out), 3.0)
    assert np.allclose(out / 3.0, q / 5.0)
    assert not qt.q_soft_threshold(q, 5.0).any()
    assert not qt.q_soft_threshold(q, 7.0).any()
    with pytest.raises(ValueError):
        qt.q_soft_threshold(q, -1.0)


def test_soft_threshold_radial_grid_oracle(rng):
    # along the ray a = t q/|q| the objective is tau t + (t - |q|)^2 / 2
    for _ in range(50):
        q = random_quat(rng)
        tau = rng.uniform(0, 3)
        out = qt.q_soft_threshold(q, tau)
        m = np.linalg.norm(q)
        t = np.arange(0.0, m + 1.0, 1e-4)
        obj = tau * t + 0.5 * (t - m) ** 2
        got = tau * np.linalg.norm(out) + 0.5 * np.linalg.norm(out - q) ** 2
        assert got <= obj.min() + 1e-8
        assert abs(np.linalg.norm(out) - t[np.argmin(obj)]) <= 1e-4


@given(quats, quats, st.floats(0, 100))
def test_soft_threshold_nonexpansive(a, b, tau):
    da = qt.q_soft_threshold(a, tau) - qt.q_soft_threshold(b, tau)
    assert np.linalg.norm(da) <= np.linalg.norm(a - b) * (1 + 1e-12) + 1e-12


# --- QSVD


def check_qsvd(Q, tol=1e-10):
    U, s, V = qt.qsvd(Q)
    M, N = Q.shape[:2]
    assert U.shape == (M, M, 4) and V.shape == (N, N, 4) and s.shape == (min(M, N),)
    assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
    recon = qt.qmatmul(qt.qmatmul(U, qt.sigma_matrix(s, (M, N))), qt.qhermitian(V))
    scale = max(qt.frobenius_norm(Q), 1e-300)
    assert qt.frobenius_norm(recon - Q) <= tol * scale
    assert qt.frobenius_norm(qt.qmatmul(qt.qhermitian(U), U) - qt.qeye(M)) <= tol * np.sqrt(M)
    assert qt.frobenius_norm(qt.qmatmul(qt.qhermitian(V), V) - qt.qeye(N)) <= tol * np.sqrt(N)
    return U, s, V


def test_qsvd_identity():
    _, s, _ = check_qsvd(qt.qeye(5))
    assert np.allclose(s, 1.0, rtol=0, atol=1e-14)


def test_qsvd_rank_one(rng):
    u = random_quat(rng, (6,))
    v = random_quat(rng, (4,))
    u /= np.linalg.norm(u)
    v /= np.linalg.norm(v)
    Q = qt.qmatmul(u[:, None, :], qt.qhermitian(v[:, None, :]))
    _, s, _ = check_qsvd(Q)
    assert np.allclose(s, [1.0, 0.0, 0.0, 0.0], rtol=0, atol=1e-12)
    assert qt.numerical_rank(s) == 1


def test_qsvd_random_8x6_against_adjoint_oracle(rng):
    Q = random_quat(rng, (8, 6))
    _, s, _ = check_qsvd(Q)
    ref = np.linalg.svd(adjoint_oracle(Q), compute_uv=False)
    assert np.allclose(ref[0::2], ref[1::2], rtol=0, atol=1e-12)
    assert np.abs(s - ref[0::2][:6]).max() <= 1e-10


def test_qsvd_zero_and_repeated(rng):
    check_qsvd(np.zeros((3, 5, 4)), tol=0)
    # diagonal with repeated values, then rotated by random unitaries
    D = qt.sigma_matrix(np.array([2.0, 2.0, 2.0, 1.0]), (4, 4))
    A, _, _ = qt.qsvd(random_quat(rng, (4, 4)))
    B, _, _ = qt.qsvd(random_quat(rng, (4, 4)))
    Q = qt.qmatmul(qt.qmatmul(A, D), qt.qhermitian(B))
    _, s, _ = check_qsvd(Q)
    assert np.allclose(s, [2, 2, 2, 1], rtol=0, atol=1e-12)


def test_qsvd_norm_identity_and_phase(rng):
    Q = random_quat(rng, (7, 9))
    U, s, _ = qt.qsvd(Q)
    assert np.isclose(np.sum(s**2), qt.frobenius_norm(Q) ** 2, rtol=1e-10)
    assert np.isclose(qt.nuclear_norm(Q), s.sum(), rtol=1e-12)
    for i in range(U.shape[1]):
        top = U[np.argmax(qt.qabs(U[:, i])), i]
        assert top[0] > 0 and np.abs(top[1:]).max() <= 1e-14


def test_qsvd_deterministic(rng):
    Q = random_quat(rng, (5, 5))
    a = qt.qsvd(Q)
    b = qt.qsvd(Q.copy())
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_qsvd_rejects_batches(rng):
    with pytest.raises(DimensionMismatch):
        qt.qsvd(random_quat(rng, (2, 3, 3)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_qsvd_property(m, n, seed):
    Q = np.random.default_rng(seed).normal(size=(m, n, 4))
    check_qsvd(Q)


def test_complex_svd_fallback(monkeypatch, rng):
    a = rng.normal(size=(3, 4, 4)) + 1j * rng.normal(size=(3, 4, 4))
    expect = np.linalg.svd(a, compute_uv=False)

    def broken(*args, **kwargs):
        raise np.linalg.LinAlgError("SVD did not converge")

    monkeypatch.setattr(qt.np.linalg, "svd", broken)
    s = qt.complex_svd(a, compute_uv=False)
    assert rel(s, expect) <= 1e-12
