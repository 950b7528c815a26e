import numpy as np
import pytest
from numpy.testing import assert_allclose

from conditional_parity.core.dataset import DataColumn
from conditional_parity.core.kernels import (GramMatrix, KernelSpec, center, centering_matrix, gram, hadamard,
                                             joint_gram, kernel_eval, median_bandwidth, pinv_sym, reg_pinv,
                                             sym_eig)
from conditional_parity.utils.error_handler import DimensionError, DomainError


def test_rbf_gram_is_symmetric_with_unit_diagonal(rng):
    col = DataColumn.continuous(rng.normal(size=(40, 3)), name='x')
    G = gram(col)
    assert G.entries.shape == (40, 40)
    assert_allclose(G.entries, G.entries.T)
    assert_allclose(np.diag(G.entries), np.ones(40))
    assert np.all(G.entries > 0) and np.all(G.entries <= 1.0)


def test_delta_gram_matches_equal_labels():
    col = DataColumn.categorical(['b', 'a', 'b', 'c'])
    G = gram(col)
    expected = np.array([[1, 0, 1, 0], [0, 1, 0, 0], [1, 0, 1, 0], [0, 0, 0, 1]], dtype=float)
    assert_allclose(G.entries, expected)


def test_kernel_kind_must_match_column():
    col = DataColumn.categorical([0, 1, 0])
    with pytest.raises(DomainError):
        gram(col, KernelSpec(kind='rbf', bandwidth=1.0))


def test_single_observation_gram():
    G = gram(np.array([3.0]))
    assert_allclose(G.entries, [[1.0]])
    assert_allclose(center(G).entries, [[0.0]])


def test_median_bandwidth():
    assert median_bandwidth(np.array([0.0, 1.0, 2.0])) == pytest.approx(1.0)
    # colunas constantes recaem na largura 1
    assert median_bandwidth(np.zeros(5)) == pytest.approx(1.0)


def test_centering_is_idempotent_and_zero_sum(rng):
    G = gram(rng.normal(size=25))
    K = center(G)
    assert K.centered
    assert_allclose(K.entries.sum(axis=0), np.zeros(25), atol=1e-12)
    M = centering_matrix(25)
    assert_allclose(K.entries, M @ G.entries @ M, atol=1e-12)
    assert center(K) is K


def test_joint_gram_with_constant_z_is_kx(rng):
    Kx = center(gram(rng.normal(size=20)))
    Kz = center(GramMatrix(entries=np.ones((20, 20))))
    assert_allclose(joint_gram(Kx, Kz).entries, Kx.entries, atol=1e-12)


def test_joint_gram_is_product_kernel(rng):
    x, z = rng.normal(size=15), rng.normal(size=15)
    Gx, Gz = gram(x), gram(z)
    expected = center(GramMatrix(entries=Gx.entries * Gz.entries)).entries
    assert_allclose(joint_gram(center(Gx), center(Gz)).entries, expected, atol=1e-12)


def test_asymmetric_gram_rejected():
    with pytest.raises(DomainError):
        GramMatrix(entries=np.array([[1.0, 0.5], [0.2, 1.0]]))
    with pytest.raises(DimensionError):
        GramMatrix(entries=np.ones((2, 3)))


def test_sym_eig_descending_and_pinv(rng):
    B = rng.normal(size=(6, 6))
    S = B @ B.T + np.eye(6)
    eigvals, eigvecs = sym_eig(S)
    assert np.all(np.diff(eigvals) <= 1e-12)
    assert_allclose(eigvecs @ np.diag(eigvals) @ eigvecs.T, S, atol=1e-10)
    assert_allclose(pinv_sym(S), np.linalg.pinv(S), atol=1e-8)


def test_reg_pinv_requires_centered_gram(rng):
    G = gram(rng.normal(size=10))
    with pytest.raises(DomainError):
        reg_pinv(G, 0.1)
    K = center(G)
    R = reg_pinv(K, 0.1)
    assert_allclose(R, np.linalg.pinv(K.entries + 0.1 * centering_matrix(10)), atol=1e-8)


def test_kernel_eval_matches_gram_entries(rng):
    points = rng.normal(size=(5, 2))
    spec = KernelSpec(kind='rbf', bandwidth=0.7)
    G = gram(DataColumn.continuous(points), spec)
    assert G.entries[1, 3] == pytest.approx(kernel_eval(spec, points[1], points[3]))
    delta = KernelSpec(kind='delta')
    assert kernel_eval(delta, 2, 2) == 1.0
    assert kernel_eval(delta, 'a', 'b') == 0.0
    with pytest.raises(DomainError):
        kernel_eval(delta, 0.5, 1.0)
    with pytest.raises(DomainError):
        kernel_eval(spec, 'a', 'b')


def test_hadamard_requires_matching_shapes():
    K = hadamard(GramMatrix(entries=np.eye(3)), GramMatrix(entries=np.full((3, 3), 2.0)))
    assert_allclose(K.entries, 2.0 * np.eye(3))
    with pytest.raises(DimensionError):
        hadamard(GramMatrix(entries=np.eye(2)), GramMatrix(entries=np.eye(3)))
