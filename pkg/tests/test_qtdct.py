import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_tensor, rel
from quatcomp import quaternion as qt
from quatcomp.errors import DimensionMismatch
from quatcomp.qtdct import (
    GRAY_AXIS,
    QtdctContext,
    qtdct_forward,
    qtdct_forward_right,
    qtdct_inverse,
    qtdct_inverse_right,
    sparsity_profile,
)
from quatcomp.tensor import QTensor3, dct_matrix


def direct_qtdct(T, ctx):
    """Entry-by-entry ``u * sum_ijk C1[a,i] C2[b,j] C3[c,k] T[i,j,k]``."""
    comp = T.components()
    c1, c2, c3 = (dct_matrix(n) for n in T.shape)
    i1, i2, i3 = T.shape
    out = np.zeros_like(comp)
    for a in range(i1):
        for b in range(i2):
            for c in range(i3):
                acc = np.zeros(4)
                for i in range(i1):
                    for j in range(i2):
                        for k in range(i3):
                            acc += c1[a, i] * c2[b, j] * c3[c, k] * comp[i, j, k]
                out[a, b, c] = qt.qmul(ctx.u, acc)
    return QTensor3.from_components(out)


def test_context_validation():
    ctx = QtdctContext((3, 4, 5))
    assert np.allclose(ctx.u, GRAY_AXIS)
    assert np.allclose(qt.qmul(ctx.u, ctx.u), [-1, 0, 0, 0], atol=1e-15)
    for m in ctx.mats:
        assert np.allclose(m @ m.T, np.eye(len(m)), atol=1e-14)
    with pytest.raises(ValueError):
        QtdctContext((3, 4, 5), u=[0.5, 0.5, 0.5, 0.5])
    with pytest.raises(ValueError):
        QtdctContext((3, 4, 5), u=[0.0, 1.0, 1.0, 0.0])
    with pytest.raises(DimensionMismatch):
        QtdctContext((3, 0, 5))
    with pytest.raises(DimensionMismatch):
        qtdct_forward(QTensor3.zeros((3, 4, 6)), ctx)


def test_direct_mode_product_oracle(rng):
    T = random_tensor(rng, (4, 4, 3))
    ctx = QtdctContext(T.shape)
    ref = direct_qtdct(T, ctx)
    assert np.abs(qtdct_forward(T, ctx).data - ref.data).max() <= 1e-10
    assert np.abs(qtdct_forward(T, ctx, cayley_dickson=True).data - ref.data).max() <= 1e-10


def test_constant_tensor_concentrates_at_dc():
    c = np.array([0.0, 0.2, 0.5, 0.7])
    dims = (3, 4, 5)
    T = QTensor3.from_components(np.broadcast_to(c, (*dims, 4)))
    ctx = QtdctContext(dims)
    S = qtdct_forward(T, ctx)
    expect = qt.qmul(ctx.u, c) * np.sqrt(np.prod(dims))
    comp = S.components()
    assert np.allclose(comp[0, 0, 0], expect, atol=1e-13)
    rest = comp.copy()
    rest[0, 0, 0] = 0
    assert np.abs(rest).max() <= 1e-13
    assert rel(qtdct_inverse(S, ctx).data, T.data) <= 1e-14
    prof = sparsity_profile(S)
    assert np.count_nonzero(prof.counts[1:]) == 1 and prof.counts[-1] == 1


def test_round_trip_parseval_and_zero(rng):
    T = random_tensor(rng, (5, 6, 4))
    ctx = QtdctContext(T.shape)
    S = qtdct_forward(T, ctx)
    assert rel(qtdct_inverse(S, ctx).data, T.data) <= 1e-10
    assert abs(S.norm() - T.norm()) <= 1e-10 * T.norm()
    assert qtdct_inverse(QTensor3.zeros(T.shape), ctx).norm() == 0.0


def test_linearity(rng):
    A = random_tensor(rng, (3, 4, 2))
    B = random_tensor(rng, (3, 4, 2))
    ctx = QtdctContext(A.shape)
    lhs = qtdct_forward(2.5 * A + B, ctx)
    rhs = 2.5 * qtdct_forward(A, ctx) + qtdct_forward(B, ctx)
    assert rel(lhs.data, rhs.data) <= 1e-10


def test_pure_input_is_not_kept_pure(rng):
    T = QTensor3.from_parts(x=rng.random((3, 3, 2)), y=rng.random((3, 3, 2)), z=rng.random((3, 3, 2)))
    assert not qtdct_forward(T, QtdctContext(T.shape)).is_pure()


def test_right_handed_round_trip(rng):
    T = random_tensor(rng, (4, 3, 3))
    ctx = QtdctContext(T.shape)
    S = qtdct_forward_right(T, ctx)
    assert rel(qtdct_inverse_right(S, ctx).data, T.data) <= 1e-10
    # the left and right forms differ because u does not commute with T
    assert rel(S.data, qtdct_forward(T, ctx).data) > 1e-3


def test_custom_axis(rng):
    u = np.array([0.0, 1.0, 0.0, 0.0])
    T = random_tensor(rng, (2, 3, 4))
    ctx = QtdctContext(T.shape, u)
    assert rel(qtdct_inverse(qtdct_forward(T, ctx), ctx).data, T.data) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_round_trip_property(i1, i2, i3, seed):
    T = random_tensor(np.random.default_rng(seed), (i1, i2, i3))
    ctx = QtdctContext(T.shape)
    S = qtdct_forward(T, ctx)
    assert rel(qtdct_inverse(S, ctx).data, T.data) <= 1e-10
    assert abs(S.norm() - T.norm()) <= 1e-10 * T.norm()


def test_sparsity_profile_all_zero():
    prof = sparsity_profile(QTensor3.zeros((2, 3, 4)), bins=10)
    assert prof.counts[0] == 24 and prof.counts[1:].sum() == 0
    assert prof.sparsity == 1.0
    assert prof.cumulative_fraction()[0] == 1.0


def test_sparsity_profile_counts(rng):
    T = random_tensor(rng, (5, 5, 5))
    prof = sparsity_profile(T, bins=20, rel_floor=1e-2)
    mod = T.modulus().ravel()
    assert prof.counts.sum() == mod.size
    assert len(prof.edges) == 21
    assert prof.edges[-1] == mod.max()
    assert np.isclose(prof.edges[1], 1e-2 * mod.max())
    assert prof.sparsity == np.mean(mod <= 1e-2 * mod.max())
    assert prof.cumulative_fraction()[-1] == 1.0
    with pytest.raises(ValueError):
        sparsity_profile(T, bins=1)


def test_sparsity_value_on_floor_goes_to_zero_bin():
    data = np.zeros((1, 1, 2, 4))
    data[0, 0, 0, 0] = 1.0
    data[0, 0, 1, 0] = 1e-3
    prof = sparsity_profile(QTensor3(data), bins=4)
    assert prof.counts[0] == 1 and prof.counts[-1] == 1
    assert prof.sparsity == 0.5
