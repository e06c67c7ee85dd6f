import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticewalk.core import (DiagonalSample, Dims, GroupElement,
                              LieAlgebraElement, UnipotentParam, ad_action,
                              ad_unipotent_block, conj_scaling,
                              conj_scaling_log, embed_u, product_Pi,
                              q_project, theta_i)


def test_dims_properties():
    d = Dims(2, 3)
    assert d.k0 == 5
    assert d.k == 6


@pytest.mark.parametrize("k1,k2", [(0, 1), (1, 0), (-2, 3)])
def test_dims_rejects_nonpositive_blocks(k1, k2):
    with pytest.raises(ValueError):
        Dims(k1, k2)


def test_group_element_rejects_non_sl():
    with pytest.raises(ValueError):
        GroupElement(Dims(1, 1), 2.0 * np.eye(2))
    with pytest.raises(ValueError):
        GroupElement(Dims(1, 1), np.eye(3))


def test_group_element_matmul_and_inverse():
    d = Dims(1, 1)
    g = GroupElement(d, np.array([[2.0, 1.0], [1.0, 1.0]]))
    h = g @ g.inverse()
    assert np.allclose(h.entries, np.eye(2), atol=1e-12)
    assert np.allclose(GroupElement.identity(d).entries, np.eye(2))


def test_diagonal_sample_forces_last_coordinate():
    d = Dims(2, 1)
    a = DiagonalSample(d, np.array([0.4, 0.1, 123.0]))
    assert a.log_entries[-1] == -(0.4 + 0.1)
    assert a.log_entries.sum() == 0.0
    b = DiagonalSample.from_head(d, [0.4, 0.1])
    assert np.array_equal(a.log_entries, b.log_entries)


def test_diagonal_sample_matrix_is_sl():
    a = DiagonalSample.from_head(Dims(1, 1), [0.7])
    m = a.matrix().entries
    assert np.allclose(m, np.diag([np.exp(0.7), np.exp(-0.7)]))
    assert np.isclose(np.linalg.det(m), 1.0)


def test_diagonal_sample_inverse_floor_dblfloor():
    a = DiagonalSample(Dims(2, 1), np.array([0.4, 0.1, -0.5]))
    assert np.array_equal(a.inverse().log_entries, [-0.4, -0.1, 0.5])
    assert a.floor() == -0.5
    # min over first block + min over second block: 0.1 + (-0.5)
    assert np.isclose(a.dblfloor(), -0.4)


def test_unipotent_param_row_major_block():
    d = Dims(2, 3)
    x = UnipotentParam(d, np.arange(6.0))
    assert np.array_equal(x.block(), [[0, 1, 2], [3, 4, 5]])


def test_embed_u_structure():
    d = Dims(2, 1)
    g = embed_u(UnipotentParam(d, [2.0, 3.0]))
    expected = np.array([[1, 0, 2], [0, 1, 3], [0, 0, 1.0]])
    assert np.array_equal(g.entries, expected)


def test_lie_algebra_element_rejects_trace():
    with pytest.raises(ValueError):
        LieAlgebraElement(Dims(1, 1), np.eye(2))


def test_conj_scaling_oracle_2d():
    # a = diag(2, 1/2): a^-1 u(x) a = u(x/4), so C_a = 1/4
    a = DiagonalSample(Dims(1, 1), np.array([np.log(2.0), -np.log(2.0)]))
    assert np.allclose(conj_scaling(a), [0.25])


def test_conj_scaling_oracle_3d():
    # t = (0.4, 0.1, -0.5), row-major coefficients exp(t_3 - t_i)
    a = DiagonalSample(Dims(2, 1), np.array([0.4, 0.1, -0.5]))
    assert np.allclose(conj_scaling_log(a), [-0.9, -0.6])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10_000))
def test_conj_scaling_matches_matrix_identity(k1, k2, seed):
    """a^-1 u(x) a = u(C_a x) as a matrix identity."""
    d = Dims(k1, k2)
    rng = np.random.default_rng(seed)
    a = DiagonalSample.from_head(d, rng.uniform(-1, 1, d.k0 - 1))
    x = UnipotentParam(d, rng.uniform(-2, 2, d.k))
    lhs = (a.inverse().matrix() @ embed_u(x) @ a.matrix()).entries
    rhs = embed_u(UnipotentParam(d, conj_scaling(a) * x.x)).entries
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_theta_and_product_pi():
    d = Dims(1, 1)
    a1 = DiagonalSample.from_head(d, [0.3])
    a2 = DiagonalSample.from_head(d, [0.2])
    assert np.allclose(theta_i([a1, a2]), conj_scaling(a1) * conj_scaling(a2))
    assert np.allclose(product_Pi([a1, a2]).log_entries, [0.5, -0.5])
    with pytest.raises(ValueError):
        theta_i([])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10_000))
def test_ad_unipotent_block_matches_conjugation(k1, k2, seed):
    d = Dims(k1, k2)
    rng = np.random.default_rng(seed)
    m = rng.uniform(-1, 1, (d.k0, d.k0))
    m -= np.trace(m) / d.k0 * np.eye(d.k0)
    v = LieAlgebraElement(d, m)
    x = UnipotentParam(d, rng.uniform(-2, 2, d.k))
    direct = ad_action(embed_u(x), v).entries
    blockwise = ad_unipotent_block(x, v)
    assert np.allclose(direct, blockwise, atol=1e-10)


def test_ad_action_preserves_trace():
    d = Dims(1, 1)
    v = LieAlgebraElement(d, np.array([[1.0, 2.0], [3.0, -1.0]]))
    g = GroupElement(d, np.array([[2.0, 1.0], [1.0, 1.0]]))
    w = ad_action(g, v)
    assert abs(np.trace(w.entries)) < 1e-12


def test_q_project_picks_upper_right_block():
    d = Dims(2, 1)
    m = np.array([[0.0, 0, 5], [0, 0, 7], [1, 1, 0]])
    assert np.array_equal(q_project(LieAlgebraElement(d, m)).x, [5.0, 7.0])
