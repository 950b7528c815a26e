import numpy as np
import pytest
from numpy.testing import assert_allclose

from conditional_parity.core.cp_test import kci_test
from conditional_parity.core.dataset import DataColumn
from conditional_parity.core.debias import BiasSubspace, estimate_bias_subspace, project_out
from conditional_parity.utils.error_handler import DimensionError, DomainError


def test_differences_along_first_axis():
    pairs = np.array([
        [[1.0, 0.3, 0.0], [-1.0, 0.3, 0.0]],
        [[2.0, -0.5, 1.0], [-2.0, -0.5, 1.0]],
        [[0.5, 0.0, 2.0], [-0.5, 0.0, 2.0]],
    ])
    subspace = estimate_bias_subspace(pairs, 1)
    assert_allclose(np.abs(subspace.basis[:, 0]), [1.0, 0.0, 0.0], atol=1e-12)
    projected = project_out(np.array([3.0, 4.0, 5.0]), subspace)
    assert_allclose(projected, [0.0, 4.0, 5.0], atol=1e-12)


def test_projection_is_orthogonal_to_basis(rng):
    pairs = rng.normal(size=(40, 2, 6))
    subspace = estimate_bias_subspace(pairs, 2)
    assert_allclose(subspace.basis.T @ subspace.basis, np.eye(2), atol=1e-12)
    vectors = rng.normal(size=(25, 6))
    projected = project_out(vectors, subspace)
    assert np.max(np.abs(projected @ subspace.basis)) <= 1e-10
    # projetar de novo não muda nada
    assert_allclose(project_out(projected, subspace), projected, atol=1e-12)
    assert np.all(np.diff(subspace.explained_variance) <= 1e-12)


def test_pair_differences_are_not_centered(rng):
    diffs = np.array([2.0, 0.0, 0.0]) + 0.05 * rng.normal(size=(30, 3))
    base = rng.normal(size=(30, 3))
    pairs = np.stack([base + 0.5 * diffs, base - 0.5 * diffs], axis=1)
    subspace = estimate_bias_subspace(pairs, 1)
    # a média comum das diferenças é a direção do viés
    _, _, vt = np.linalg.svd(diffs, full_matrices=False)
    assert abs(subspace.basis[:, 0] @ vt[0]) == pytest.approx(1.0, abs=1e-10)
    assert abs(subspace.basis[0, 0]) > 0.99


def test_rank_zero_is_identity(rng):
    subspace = estimate_bias_subspace(rng.normal(size=(5, 2, 3)), 0)
    assert subspace.r == 0 and subspace.dim == 3
    vectors = rng.normal(size=(4, 3))
    assert_allclose(project_out(vectors, subspace), vectors)


def test_rank_larger_than_differences():
    pairs = np.array([[[1.0, 0.0], [0.0, 0.0]], [[2.0, 0.0], [0.0, 0.0]]])
    with pytest.raises(DomainError):
        estimate_bias_subspace(pairs, 2)
    with pytest.raises(DomainError):
        estimate_bias_subspace(pairs, -1)


def test_dimension_checks(rng):
    subspace = BiasSubspace(basis=np.eye(3)[:, :1], explained_variance=np.ones(1))
    with pytest.raises(DimensionError):
        project_out(np.ones(4), subspace)
    with pytest.raises(DimensionError):
        estimate_bias_subspace(rng.normal(size=(3, 3, 2)), 1)


def _biased_embeddings(rng, n, bias):
    z = rng.normal(size=n)
    a = (z + rng.normal(size=n) > 0).astype(int)
    g = np.array([0.0, 1.0, 0.5, -0.5, 0.0])
    x = np.outer(np.sin(z), g) + 3.0 * np.outer(a, bias) + 0.5 * rng.normal(size=(n, 5))
    return x, a, z


@pytest.mark.slow
def test_projected_embeddings_pass_conditional_parity():
    rng = np.random.default_rng(41)
    bias = np.array([1.0, 0.0, 0.0, 1.0, 0.0]) / np.sqrt(2.0)
    centers = rng.normal(size=(30, 5))
    pairs = np.stack([centers + bias, centers - bias], axis=1) + 1e-3 * rng.normal(size=(30, 2, 5))
    subspace = estimate_bias_subspace(pairs, 1)
    assert abs(subspace.basis[:, 0] @ bias) > 0.999

    rejections = []
    for _ in range(200):
        x, a, z = _biased_embeddings(rng, 200, bias)
        result = kci_test(DataColumn.continuous(project_out(x, subspace)), DataColumn.categorical(a),
                          DataColumn.continuous(z))
        rejections.append(result.p_value < 0.05)
    assert 0.02 <= np.mean(rejections) <= 0.10

    x, a, z = _biased_embeddings(rng, 200, bias)
    assert kci_test(DataColumn.continuous(x), DataColumn.categorical(a), DataColumn.continuous(z)).p_value < 0.01
