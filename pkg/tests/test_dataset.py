import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_array_equal

from conditional_parity.core.dataset import DataColumn, Dataset
from conditional_parity.utils.data_validator import data_validator
from conditional_parity.utils.error_handler import DimensionError, DomainError, InputParseError, UsageError


def test_kind_inference(mixed_frame):
    data = Dataset.from_frame(mixed_frame.astype(str))
    assert data['x'].kind == 'continuous'
    assert data['a'].kind == 'continuous'
    assert data['g'].kind == 'categorical'
    assert data['g'].levels == ('p', 'q', 'r')
    assert data.n_rows == 30


def test_forced_categorical_keeps_numeric_order():
    frame = pd.DataFrame({'v': ['10', '1', '0', '1']})
    col = Dataset.from_frame(frame, categorical=['v'])['v']
    assert col.kind == 'categorical'
    assert col.levels == (0.0, 1.0, 10.0)
    assert_array_equal(col.values, [2, 1, 0, 1])


def test_single_bad_value_makes_column_categorical():
    frame = pd.DataFrame({'v': ['1', '2', 'x']})
    assert Dataset.from_frame(frame)['v'].kind == 'categorical'


def test_csv_with_quotes_and_missing_fields(tmp_path):
    path = tmp_path / 'data.csv'
    path.write_text('name,score\n"Silva, A.",1.5\n"B",2\n', encoding='utf-8')
    data = Dataset.from_csv(path)
    assert data['name'].levels == ('B', 'Silva, A.')
    assert data['score'].kind == 'continuous'

    path.write_text('name,score\nA,1\nB,\n', encoding='utf-8')
    with pytest.raises(InputParseError):
        Dataset.from_csv(path)


def test_missing_file_and_missing_column(tmp_path, simpson_data):
    with pytest.raises(InputParseError):
        Dataset.from_csv(tmp_path / 'nope.csv')
    with pytest.raises(UsageError):
        simpson_data['salary']


def test_matrix_and_binarize(null_data):
    M = null_data.matrix(['x', 'z'])
    assert M.shape == (200, 2)
    a = null_data['z'].binarize(0.0)
    assert a.kind == 'categorical' and a.levels == (0, 1)
    assert_array_equal(a.values, (null_data['z'].values >= 0.0).astype(int))
    with pytest.raises(DomainError):
        DataColumn.categorical(['p', 'q']).binarize(0.5)


def test_column_validation():
    with pytest.raises(DomainError):
        DataColumn.continuous([1.0])
    with pytest.raises(DomainError):
        DataColumn.continuous([1.0, np.nan])


def test_validator_helpers():
    assert_array_equal(data_validator.validate_binary(np.array(['0', '1', '1'], dtype=object)), [0, 1, 1])
    with pytest.raises(DomainError):
        data_validator.validate_binary(np.array([0.0, 0.5]))
    with pytest.raises(DimensionError):
        data_validator.validate_same_length([1, 2], [1, 2, 3])
    with pytest.raises(DomainError):
        data_validator.validate_pmf(np.array([0.7, 0.7]))
