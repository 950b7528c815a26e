from pathlib import Path

import numpy as np
import orjson
import pandas as pd
import pytest

from conditional_parity.config import KCI_CONFIG, VERSION
from conditional_parity.runner import run

FIXTURES = Path(__file__).resolve().parent.parent / 'conditional_parity' / 'fixtures'

NULL_CSV = str(FIXTURES / 'null_test.csv')
SIMPSON_CSV = str(FIXTURES / 'simpson.csv')
ACCIDENT = str(FIXTURES / 'accident.sem')
PRIEST = str(FIXTURES / 'priest.sem')


def _report(capsys) -> dict:
    return orjson.loads(capsys.readouterr().out)


@pytest.fixture
def scores_csv(tmp_path) -> Path:
    rng = np.random.default_rng(2)
    n = 600
    a = rng.integers(0, 2, size=n)
    y = (rng.random(n) < 0.4 + 0.2 * a).astype(int)
    s = rng.normal(y + 0.7 * a, 1.0)
    path = tmp_path / 'scores.csv'
    pd.DataFrame({'s': s, 'a': a, 'y': y}).to_csv(path, index=False)
    return path


def test_version(capsys):
    assert run(['--version']) == 0
    assert VERSION in capsys.readouterr().out


def test_usage_errors_from_parser():
    assert run([]) == 2
    assert run(['test', '--input', NULL_CSV]) == 2
    assert run(['test', '--input', NULL_CSV, '--x', 'x', '--a', 'a', '--seed', '-1']) == 2


def test_kci_on_null_fixture(capsys):
    assert run(['test', '--input', NULL_CSV, '--x', 'x', '--a', 'a', '--z', 'z', '--seed', '1']) == 0
    report = _report(capsys)
    assert report['command'] == 'test'
    assert 0.0 <= report['p_value'] <= 1.0
    assert report['n'] == 200
    assert report['config']['lambda'] == pytest.approx(KCI_CONFIG['lambda'])
    assert report['sweep'] is None


def test_kci_output_is_deterministic(capsys):
    argv = ['test', '--input', NULL_CSV, '--x', 'x_dep', '--a', 'a', '--z', 'z', '--null', 'mc',
            '--mc-reps', '200', '--seed', '5']
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first
    assert orjson.loads(first)['method'] == 'montecarlo'


def test_kci_binarize_sweep(capsys):
    assert run(['test', '--input', NULL_CSV, '--x', 'x', '--a', 'a', '--z', 'z',
                '--binarize-at', '1.5']) == 0
    report = _report(capsys)
    assert report['p_value'] == 1.0
    assert report['threshold'] == 1.5

    assert run(['test', '--input', NULL_CSV, '--x', 'x', '--a', 'a', '--z', 'z',
                '--binarize-at', '0.5,1.5']) == 0
    sweep = _report(capsys)['sweep']
    assert [point['threshold'] for point in sweep] == [0.5, 1.5]


def test_kci_input_errors(tmp_path):
    assert run(['test', '--input', NULL_CSV, '--x', 'nope', '--a', 'a']) == 2
    assert run(['test', '--input', NULL_CSV, '--x', 'x', '--a', 'a', '--lambda', '-1']) == 2
    assert run(['test', '--input', str(tmp_path / 'missing.csv'), '--x', 'x', '--a', 'a']) == 3
    bad = tmp_path / 'bad.csv'
    bad.write_text('x,a\n1,0\n2\n', encoding='utf-8')
    assert run(['test', '--input', str(bad), '--x', 'x', '--a', 'a']) == 3


def test_audit_modes(capsys):
    assert run(['audit', '--input', SIMPSON_CSV, '--x', 'admitted', '--a', 'gender']) == 0
    assert _report(capsys)['epsilon_hat'] == pytest.approx(0.36)

    assert run(['audit', '--input', SIMPSON_CSV, '--x', 'admitted', '--a', 'gender',
                '--mode', 'cp', '--z', 'department', '--pretty']) == 0
    report = _report(capsys)
    assert report['epsilon_hat'] == pytest.approx(0.0, abs=1e-12)
    assert len(report['per_stratum']) == 2

    assert run(['audit', '--input', SIMPSON_CSV, '--x', 'admitted', '--a', 'gender',
                '--mode', 'eopp']) == 2


def test_randomize_writes_artifacts(capsys, scores_csv, tmp_path):
    out = tmp_path / 'kern.json'
    argv = ['randomize', '--input', str(scores_csv), '--s', 's', '--a', 'a', '--y', 'y',
            '--k', '4', '--k1', '4', '--out', str(out), '--seed', '3']
    assert run(argv) == 0
    report = _report(capsys)
    assert report['parity_residual'] <= 1e-8
    assert np.allclose(np.sum(report['K0'], axis=1), 1.0)

    randomized = tmp_path / 'kern_randomized.csv'
    curves = tmp_path / 'kern_curves.tsv'
    assert out.exists() and randomized.exists() and curves.exists()
    frame = pd.read_csv(randomized)
    assert frame['randomized_score'].between(1, 4).all()
    assert frame['score_bin'].between(1, 4).all()

    first = [path.read_bytes() for path in (out, randomized, curves)]
    assert run(argv) == 0
    assert [path.read_bytes() for path in (out, randomized, curves)] == first


def test_randomize_empty_cell(tmp_path):
    path = tmp_path / 'skewed.csv'
    pd.DataFrame({'s': np.arange(8.0), 'a': [0, 0, 0, 0, 1, 1, 1, 1],
                  'y': [0, 1, 0, 1, 0, 0, 0, 0]}).to_csv(path, index=False)
    assert run(['randomize', '--input', str(path), '--s', 's', '--a', 'a', '--y', 'y',
                '--k', '2', '--k1', '2', '--out', str(tmp_path / 'k.json')]) == 4


def test_simulate_sat(capsys, tmp_path):
    assert run(['simulate-sat', '--n', '0', '--out', str(tmp_path)]) == 2
    assert run(['simulate-sat', '--n', '100', '--tau-z', '0', '--out', str(tmp_path)]) == 2

    out = tmp_path / 'sat'
    assert run(['simulate-sat', '--n', '3000', '--k', '8', '--k1', '8', '--seed', '1',
                '--out', str(out)]) == 0
    report = _report(capsys)
    for name in ('sat_samples.csv', 'sat_curves.tsv', 'sat_brier.tsv', 'sat_report.json'):
        assert (out / name).exists()
    expected = {(row['decision'], row['group']): row['expected'] for row in report['brier']}
    for a in (0, 1):
        assert expected[('bayes', a)] <= expected[('binned_bayes', a)] + 1e-12
        assert expected[('binned_bayes', a)] <= expected[('randomized', a)] + 1e-12

    names = ('sat_samples.csv', 'sat_curves.tsv', 'sat_brier.tsv', 'sat_report.json')
    first = [(out / name).read_bytes() for name in names]
    assert run(['simulate-sat', '--n', '3000', '--k', '8', '--k1', '8', '--seed', '1',
                '--out', str(out)]) == 0
    assert [(out / name).read_bytes() for name in names] == first


@pytest.fixture
def embedding_files(tmp_path):
    vectors = tmp_path / 'vectors.csv'
    pd.DataFrame({'word': ['doctor', 'nurse', 'king'],
                  'e1': [0.5, -0.5, 1.0], 'e2': [1.0, 2.0, 0.0], 'e3': [0.0, 1.0, 3.0]}
                 ).to_csv(vectors, index=False)
    pairs = tmp_path / 'pairs.csv'
    pd.DataFrame({'v_e1': [1.0, 2.0], 'v_e2': [0.0, 1.0], 'v_e3': [0.0, 0.0],
                  'w_e1': [-1.0, 0.0], 'w_e2': [0.0, 1.0], 'w_e3': [0.0, 0.0]}
                 ).to_csv(pairs, index=False)
    return vectors, pairs


def test_debias_projects_out_pair_direction(capsys, embedding_files, tmp_path):
    vectors, pairs = embedding_files
    out = tmp_path / 'projected.csv'
    assert run(['debias', '--input', str(vectors), '--pairs', str(pairs), '--rank', '1',
                '--out', str(out)]) == 0
    report = _report(capsys)
    assert report['columns'] == ['e1', 'e2', 'e3']
    assert report['max_inner_product'] <= 1e-12
    assert np.allclose(np.abs(report['basis'][0]), [1.0, 0.0, 0.0])
    projected = pd.read_csv(out)
    assert np.allclose(projected['e1'], 0.0)
    assert np.allclose(projected['e2'], [1.0, 2.0, 0.0])
    assert list(projected['word']) == ['doctor', 'nurse', 'king']


def test_debias_rank_zero_and_too_large(capsys, embedding_files, tmp_path):
    vectors, pairs = embedding_files
    out = tmp_path / 'same.csv'
    assert run(['debias', '--input', str(vectors), '--pairs', str(pairs), '--rank', '0',
                '--out', str(out)]) == 0
    assert np.allclose(pd.read_csv(out)[['e1', 'e2', 'e3']], pd.read_csv(vectors)[['e1', 'e2', 'e3']])
    assert run(['debias', '--input', str(vectors), '--pairs', str(pairs), '--rank', '5',
                '--out', str(out)]) == 4


def test_sem_checks(capsys):
    assert run(['sem', '--model', ACCIDENT, '--check', 'dsep']) == 0
    report = _report(capsys)
    assert report['verdict'] is False
    assert report['details']['conditional_mutual_information'] > 0

    assert run(['sem', '--model', PRIEST, '--check', 'eco']) == 0
    report = _report(capsys)
    assert report['verdict'] is True
    assert report['details']['paths'] == [['a', 'z', 'yhat']]

    assert run(['sem', '--model', PRIEST, '--check', 'cf', '--pretty']) == 0
    report = _report(capsys)
    assert report['verdict'] is False
    assert report['details']['epsilon_hat'] == pytest.approx(1.0)


def test_sem_errors(tmp_path):
    bare = tmp_path / 'bare.sem'
    bare.write_text('{"nodes": {"u": {"domain": [0, 1], "pmf": [0.5, 0.5]}}}\n', encoding='utf-8')
    assert run(['sem', '--model', str(bare), '--check', 'eco']) == 2
    broken = tmp_path / 'broken.sem'
    broken.write_text('{"nodes": {"u": {"domain": [0, 1], "pmf": [0.5, 0.6]}}}\n', encoding='utf-8')
    assert run(['sem', '--model', str(broken), '--check', 'eco']) == 3


def test_schema(capsys):
    assert run(['schema']) == 0
    schemas = _report(capsys)
    assert {'test', 'audit', 'randomize', 'simulate-sat', 'debias', 'sem'} <= set(schemas)
    assert schemas['sem']['type'] == 'object'
