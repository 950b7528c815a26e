import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from conditional_parity.core.cp_test import (KciConfig, epsilon_cp_discrete, hsic_statistic, kci_pvalue,
                                             kci_statistic, kci_test, null_mixture_weights, total_variation)
from conditional_parity.core.dataset import DataColumn
from conditional_parity.core.kernels import GramMatrix, center, centering_matrix, gram, joint_gram
from conditional_parity.utils.data_validator import data_validator
from conditional_parity.utils.error_handler import ConfigError, DomainError, EmptyCellError


def _oracle(Kx, Ka, Kz, lam):
    """Forma agrupada tr(Pᵀ K_xz P K_a)/n², P = I - K_z (K_z + λM)†"""
    n = Kx.n
    Kxz = joint_gram(Kx, Kz).entries
    R = np.linalg.pinv(Kz.entries + lam * centering_matrix(n))
    P = np.eye(n) - Kz.entries @ R
    return np.trace(P.T @ Kxz @ P @ Ka.entries) / n ** 2


def _random_columns(rng, n):
    x = DataColumn.continuous(rng.normal(size=n))
    if rng.random() < 0.5:
        a = DataColumn.categorical(rng.integers(0, 3, size=n))
    else:
        a = DataColumn.continuous(rng.normal(size=n))
    z = DataColumn.continuous(rng.normal(size=(n, 2)))
    return x, a, z


def test_statistic_matches_grouped_trace_formula(rng):
    for _ in range(20):
        x, a, z = _random_columns(rng, 30)
        Kx, Ka, Kz = center(gram(x)), center(gram(a)), center(gram(z))
        value = kci_statistic(Kx, Ka, Kz, 0.1)
        assert value == pytest.approx(_oracle(Kx, Ka, Kz, 0.1), rel=1e-8)


def test_constant_z_reduces_to_hsic(rng):
    Kx = center(gram(rng.normal(size=25)))
    Ka = center(gram(DataColumn.categorical(rng.integers(0, 2, size=25))))
    Kz = center(GramMatrix(entries=np.ones((25, 25))))
    assert kci_statistic(Kx, Ka, Kz, 1e-3) == pytest.approx(hsic_statistic(Kx, Ka), rel=1e-10)


def test_unconditional_weights_are_hsic_spectrum(rng):
    n = 20
    Kx = center(gram(rng.normal(size=n)))
    Ka = center(gram(DataColumn.categorical(rng.integers(0, 2, size=n))))
    Kz = center(GramMatrix(entries=np.ones((n, n))))
    weights = null_mixture_weights(joint_gram(Kx, Kz), Ka, Kz, KciConfig())
    mu = np.linalg.eigvalsh(Kx.entries) / n
    nu = np.linalg.eigvalsh(Ka.entries) / n
    # a soma dos pesos é tr(K_x)tr(K_a)/n² (autovalores desprezados são ínfimos)
    assert weights.sum() == pytest.approx(mu[mu > 0].sum() * nu[nu > 0].sum(), rel=1e-6)
    assert np.all(np.diff(weights) <= 0)


def test_gamma_pvalue_single_weight_is_chi_square():
    assert kci_pvalue(3.84, np.array([1.0])) == pytest.approx(stats.chi2.sf(3.84, 1), rel=1e-10)
    assert kci_pvalue(0.0, np.array([1.0])) == 1.0
    assert kci_pvalue(5.0, np.empty(0)) == 1.0


def test_montecarlo_pvalue_is_deterministic():
    cfg = KciConfig(null_method='montecarlo', mc_reps=200, seed=7)
    weights = np.array([0.5, 0.3, 0.1])
    first = kci_pvalue(1.2, weights, cfg)
    assert first == kci_pvalue(1.2, weights, cfg)
    assert 1.0 / 201 <= first <= 1.0
    assert kci_pvalue(1e6, weights, cfg) == pytest.approx(1.0 / 201)


def test_null_weights_match_permutation_mean():
    n, lam = 30, 1e-3
    rng = np.random.default_rng(7)
    x, a, z = _conditional_null(rng, n)
    Kx, Kz = center(gram(x)), center(gram(z))
    weights = null_mixture_weights(joint_gram(Kx, Kz), center(gram(a)), Kz, KciConfig(**{'lambda': lam}))
    permuted = []
    for _ in range(500):
        Ka = center(gram(DataColumn.categorical(a.values[rng.permutation(n)])))
        permuted.append(n * kci_statistic(Kx, Ka, Kz, lam))
    assert weights.sum() == pytest.approx(np.mean(permuted), rel=0.2)


def test_statistic_ignores_row_order(rng):
    n = 40
    x, a, z = rng.normal(size=n), rng.integers(0, 2, size=n), rng.normal(size=(n, 2))
    perm = rng.permutation(n)
    base = kci_test(DataColumn.continuous(x), DataColumn.categorical(a), DataColumn.continuous(z))
    shuffled = kci_test(DataColumn.continuous(x[perm]), DataColumn.categorical(a[perm]),
                        DataColumn.continuous(z[perm]))
    assert shuffled.statistic == pytest.approx(base.statistic, rel=1e-8, abs=1e-12)
    assert shuffled.p_value == pytest.approx(base.p_value, rel=1e-6, abs=1e-12)


def test_montecarlo_pvalue_at_chi_square_critical_value():
    cfg = KciConfig(null_method='montecarlo', mc_reps=5000, seed=3)
    # 5.991 é o quantil 0.95 da χ²_2
    assert kci_pvalue(5.991, np.array([1.0, 1.0]), cfg) == pytest.approx(0.05, abs=0.01)


def test_identical_columns_are_rejected(rng):
    a = rng.integers(0, 2, size=100)
    result = kci_test(DataColumn.categorical(a), DataColumn.categorical(a))
    assert result.p_value < 0.01
    assert not result.conditional
    assert result.statistic == pytest.approx(result.n * result.hs_norm)


def test_null_fixture_pvalue_in_unit_interval(null_data):
    result = kci_test(null_data['x'], DataColumn.categorical(null_data['a'].values.astype(int)),
                      null_data['z'])
    assert 0.0 <= result.p_value <= 1.0
    assert result.conditional
    assert result.n == 200


def test_constant_protected_attribute_gives_unit_pvalue(null_data):
    a = null_data['a'].binarize(1.5)
    result = kci_test(null_data['x'], a, null_data['z'])
    assert result.statistic == 0.0
    assert result.p_value == 1.0


def test_too_few_samples(rng):
    with pytest.raises(DomainError):
        kci_test(DataColumn.continuous(rng.normal(size=5)), DataColumn.continuous(rng.normal(size=5)))


def test_kci_config_validation():
    assert KciConfig(**{'lambda': 0.5}).lam == 0.5
    with pytest.raises(ConfigError):
        data_validator.build_model(KciConfig, lam=-1.0)
    with pytest.raises(ConfigError):
        data_validator.build_model(KciConfig, mc_reps=10)


def test_total_variation():
    assert total_variation([0.5, 0.5], [0.5, 0.5]) == 0.0
    assert total_variation([1.0, 0.0], [0.0, 1.0]) == 1.0
    assert total_variation([0.2, 0.8], [0.6, 0.4]) == pytest.approx(0.4)


def test_epsilon_demographic_parity_on_simpson(simpson_data):
    admitted = DataColumn.categorical(simpson_data['admitted'].values.astype(int))
    gender = simpson_data['gender']
    result = epsilon_cp_discrete(admitted, gender)
    assert result.epsilon_hat == pytest.approx(0.36)
    assert list(result.per_stratum) == ['all']


def test_epsilon_conditional_on_department_is_zero(simpson_data):
    admitted = DataColumn.categorical(simpson_data['admitted'].values.astype(int))
    result = epsilon_cp_discrete(admitted, simpson_data['gender'], simpson_data['department'])
    assert result.epsilon_hat == pytest.approx(0.0, abs=1e-12)
    assert set(result.per_stratum) == {'A', 'B'}


def test_single_level_protected_attribute():
    x = DataColumn.categorical([0, 1, 0, 1])
    a = DataColumn.categorical(['g', 'g', 'g', 'g'])
    assert epsilon_cp_discrete(x, a).epsilon_hat == 0.0


def test_strata_with_empty_cells_are_skipped():
    x = DataColumn.categorical([0, 1, 0, 1, 1, 0])
    a = DataColumn.categorical([0, 1, 0, 1, 0, 0])
    z = DataColumn.categorical(['u', 'u', 'u', 'u', 'v', 'v'])
    result = epsilon_cp_discrete(x, a, z)
    assert result.skipped_strata == ['v']
    assert result.epsilon_hat == pytest.approx(1.0)

    only_one_group = DataColumn.categorical(['u', 'v', 'u', 'v', 'u', 'u'])
    with pytest.raises(EmptyCellError):
        epsilon_cp_discrete(x, DataColumn.categorical([0, 1, 0, 1, 0, 0]), only_one_group)


def test_merging_levels_of_x_never_increases_epsilon():
    rng = np.random.default_rng(21)
    for _ in range(20):
        n = 300
        x = rng.integers(0, 4, size=n)
        a = DataColumn.categorical(rng.integers(0, 2, size=n))
        z = DataColumn.categorical(rng.integers(0, 3, size=n))
        fine = epsilon_cp_discrete(DataColumn.categorical(x), a, z)
        coarse = epsilon_cp_discrete(DataColumn.categorical(x // 2), a, z)
        assert coarse.epsilon_hat <= fine.epsilon_hat + 1e-12
        for stratum, tv in coarse.per_stratum.items():
            assert tv <= fine.per_stratum[stratum] + 1e-12


def _conditional_null(rng, n, effect=0.0):
    z = rng.normal(size=n)
    a = (z + rng.normal(size=n) > 0).astype(int)
    x = np.sin(z) + effect * a + 0.3 * rng.normal(size=n)
    return DataColumn.continuous(x), DataColumn.categorical(a), DataColumn.continuous(z)


@pytest.mark.slow
def test_level_under_conditional_independence():
    rng = np.random.default_rng(11)
    pvalues = np.array([kci_test(*_conditional_null(rng, 200)).p_value for _ in range(300)])
    rate = np.mean(pvalues < 0.05)
    assert 0.02 <= rate <= 0.10
    assert stats.kstest(pvalues, 'uniform').statistic <= 0.10


@pytest.mark.slow
def test_power_under_dependence():
    rng = np.random.default_rng(12)
    pvalues = np.array([kci_test(*_conditional_null(rng, 200, effect=0.5)).p_value for _ in range(100)])
    assert np.mean(pvalues < 0.05) >= 0.90
