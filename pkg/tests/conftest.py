from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from conditional_parity.core.dataset import DataColumn, Dataset
from conditional_parity.core.randomization import ConditionalPmfSet
from conditional_parity.core.sem_loader import load_sem

FIXTURES = Path(__file__).resolve().parent.parent / 'conditional_parity' / 'fixtures'


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(1)


@pytest.fixture
def null_data() -> Dataset:
    return Dataset.from_csv(FIXTURES / 'null_test.csv')


@pytest.fixture
def simpson_data() -> Dataset:
    return Dataset.from_csv(FIXTURES / 'simpson.csv')


@pytest.fixture
def accident():
    return load_sem(FIXTURES / 'accident.sem')


@pytest.fixture
def priest():
    return load_sem(FIXTURES / 'priest.sem')


@pytest.fixture
def two_regime_pmfs() -> ConditionalPmfSet:
    """Grupo a=1 muito mais espalhado entre y=0 e y=1 do que o grupo a=0"""
    return ConditionalPmfSet(
        f={
            (0, 1): np.array([0.5, 0.3, 0.2]),
            (1, 1): np.array([0.2, 0.3, 0.5]),
            (0, 0): np.array([0.45, 0.45, 0.1]),
            (1, 0): np.array([0.37, 0.37, 0.26]),
        },
        bin_edges=np.array([0.0, 1.0, 2.0, 3.0]),
    )


@pytest.fixture
def mixed_frame(rng) -> pd.DataFrame:
    n = 30
    return pd.DataFrame({
        'x': rng.normal(size=n),
        'a': rng.integers(0, 2, size=n),
        'z': rng.normal(size=n),
        'g': rng.choice(['p', 'q', 'r'], size=n),
    })
