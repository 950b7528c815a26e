"""
Regras de decisão randomizadas não discriminatórias.

Par de kernels de Markov via programa linear, randomizador gaussiano mínimo,
score de Brier e o modelo sintético do SAT (habilidade latente z, nota s).
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
import pandas as pd
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss
from pydantic import BaseModel, ConfigDict, Field
from scipy import stats
from scipy.special import expit

from .lp_solver import STATUS_NUMERICAL, LpProblem, LpSolution, solve
from ..config import RANDOMIZATION_CONFIG, SAT_CONFIG
from ..utils.data_validator import data_validator
from ..utils.debug_logger import debug_logger
from ..utils.error_handler import (DimensionError, DomainError, EmptyCellError,
                                   InfeasibleError)

logger = logging.getLogger(__name__)

GROUPS = (0, 1)


# ---------------------------------------------------------------------------
# pmfs condicionais e custo
# ---------------------------------------------------------------------------

@dataclass
class ConditionalPmfSet:
    """f[(y, a)]: histograma normalizado de s na célula (y, a), sobre k faixas"""
    f: Dict[Tuple[int, int], np.ndarray]
    bin_edges: np.ndarray
    sample_bins: Optional[np.ndarray] = None

    def __post_init__(self):
        self.bin_edges = np.asarray(self.bin_edges, dtype=float)
        k = self.bin_edges.shape[0] - 1
        if k < 1:
            raise DimensionError("bin_edges precisa de ao menos 2 valores", "bad_edges")
        for key in [(y, a) for y in GROUPS for a in GROUPS]:
            if key not in self.f:
                raise DomainError(f"pmf ausente para (y, a) = {key}", "pmf_missing")
            pmf = np.asarray(self.f[key], dtype=float)
            if pmf.shape != (k,):
                raise DimensionError(f"pmf {key} com comprimento {pmf.shape}, esperado {k}", "pmf_shape")
            data_validator.validate_pmf(pmf, tol=1e-12, name=f"f{key}")
            self.f[key] = pmf

    @property
    def k(self) -> int:
        return self.bin_edges.shape[0] - 1


class CostSpec(BaseModel):
    """Custo linear c_i |j - j(i)|^α de levar a faixa i à saída j (índices a partir de 1)"""
    model_config = ConfigDict(frozen=True)

    c: Optional[List[float]] = None
    alpha: float = Field(default=RANDOMIZATION_CONFIG['alpha'], ge=0)
    target_map: Optional[List[int]] = None

    def matrix(self, k: int, k1: int) -> np.ndarray:
        weights = np.ones(k) if self.c is None else np.asarray(self.c, dtype=float)
        if weights.shape != (k,):
            raise DimensionError(f"c deve ter comprimento {k}", "cost_shape")
        if np.any(weights < 0):
            raise DomainError("Pesos de custo devem ser não negativos", "cost_negative")
        if self.target_map is None:
            target = np.ceil(np.arange(1, k + 1) * k1 / k)
        else:
            target = np.asarray(self.target_map, dtype=float)
            if target.shape != (k,) or np.any(target < 1) or np.any(target > k1):
                raise DimensionError(f"target_map deve ter {k} valores em 1..{k1}", "cost_target")
        outputs = np.arange(1, k1 + 1)
        return weights[:, np.newaxis] * np.abs(outputs[np.newaxis, :] - target[:, np.newaxis]) ** self.alpha


def quantile_bins(s: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Faixas de igual frequência sobre s agregado.

    A faixa de cada amostra vem do posto médio, floor(k (posto - 1/2) / n), de modo
    que empates caem sempre na mesma faixa. As bordas saem das próprias faixas: a
    borda j fica no ponto médio entre o maior valor abaixo da faixa j e o menor a
    partir dela, e as extremas são o mínimo e o máximo de s. Toda amostra fica
    entre as bordas da sua faixa.
    """
    n = s.shape[0]
    ranks = stats.rankdata(s, method='average')
    bins = np.minimum(np.floor(k * (ranks - 0.5) / n).astype(np.int64), k - 1)

    top = np.full(k, -np.inf)
    bottom = np.full(k, np.inf)
    np.maximum.at(top, bins, s)
    np.minimum.at(bottom, bins, s)
    below = np.maximum.accumulate(top)[:-1]
    above = np.minimum.accumulate(bottom[::-1])[::-1][1:]
    # faixas vazias repetem a borda vizinha
    inner = np.where(np.isinf(below), above, np.where(np.isinf(above), below, 0.5 * (below + above)))
    edges = np.concatenate([[s.min()], inner, [s.max()]])
    return bins, edges


def estimate_conditional_pmfs(s, a, y, k: int) -> ConditionalPmfSet:
    """Histogramas de s por célula (y, a) nas faixas de quantis do s agregado"""
    if k < 2:
        raise DomainError(f"k deve ser >= 2 (recebeu {k})", "bad_k")
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or not np.all(np.isfinite(s)):
        raise DomainError("s deve ser um vetor numérico finito", "bad_scores")
    a = data_validator.validate_binary(a, 'a')
    y = data_validator.validate_binary(y, 'y')
    data_validator.validate_same_length(s, a, y)

    bins, edges = quantile_bins(s, k)
    f = {}
    for yv in GROUPS:
        for av in GROUPS:
            cell = (y == yv) & (a == av)
            if not cell.any():
                raise EmptyCellError(f"Célula (y={yv}, a={av}) sem amostras", "empty_cell",
                                     {'y': yv, 'a': av})
            counts = np.bincount(bins[cell], minlength=k).astype(float)
            f[(yv, av)] = counts / counts.sum()
    return ConditionalPmfSet(f=f, bin_edges=edges, sample_bins=bins)


# ---------------------------------------------------------------------------
# Programa linear e kernels de Markov
# ---------------------------------------------------------------------------

def _var_index(m: int, i: int, j: int, k: int, k1: int) -> int:
    return m * k * k1 + i * k1 + j


def build_eo_lp(pmfs: ConditionalPmfSet, k1: int, cost: Optional[CostSpec] = None,
                one_sided: bool = False) -> LpProblem:
    """
    Variáveis: entradas de K0 e K1 (linha a linha). Igualdades: paridade
    f_{y1}K1 = f_{y0}K0 (última coluna omitida por y) e somas das linhas;
    desigualdades: médias das linhas não decrescentes.

    one_sided congela K0 na identidade (exige k1 = k).
    """
    if k1 < 2:
        raise DomainError(f"k1 deve ser >= 2 (recebeu {k1})", "bad_k1")
    cost = cost or CostSpec()
    k = pmfs.k
    n_vars = 2 * k * k1
    eq_rows, ub_rows = [], []

    for yv in GROUPS:
        for j in range(k1 - 1):
            row = np.zeros(n_vars)
            for i in range(k):
                row[_var_index(1, i, j, k, k1)] += pmfs.f[(yv, 1)][i]
                row[_var_index(0, i, j, k, k1)] -= pmfs.f[(yv, 0)][i]
            eq_rows.append(row)
    for m in GROUPS:
        for i in range(k):
            row = np.zeros(n_vars)
            row[_var_index(m, i, 0, k, k1):_var_index(m, i, 0, k, k1) + k1] = 1.0
            eq_rows.append(row)
    b_eq = np.concatenate([np.zeros(2 * (k1 - 1)), np.ones(2 * k)])

    outputs = np.arange(1, k1 + 1, dtype=float)
    for m in GROUPS:
        for i in range(k - 1):
            row = np.zeros(n_vars)
            start = _var_index(m, i, 0, k, k1)
            row[start:start + k1] = outputs
            row[start + k1:start + 2 * k1] = -outputs
            ub_rows.append(row)

    weights = cost.matrix(k, k1).ravel()
    c = np.concatenate([weights, weights])

    bounds = None
    if one_sided:
        if k1 != k:
            raise DomainError("Variante unilateral exige k1 = k", "one_sided_shape")
        identity = np.eye(k).ravel()
        bounds = [(v, v) for v in identity] + [(0.0, np.inf)] * (k * k1)

    return LpProblem(c=c, A_eq=np.vstack(eq_rows), b_eq=b_eq,
                     A_ub=np.vstack(ub_rows) if ub_rows else None,
                     b_ub=np.zeros(len(ub_rows)) if ub_rows else None,
                     bounds=bounds)


@dataclass
class MarkovKernelPair:
    """K0 e K1 (k × k1, estocásticas por linha) que igualam L(saída | y, a) entre grupos"""
    K0: np.ndarray
    K1: np.ndarray
    parity_residual: float = 0.0
    objective: float = 0.0
    bin_edges: Optional[np.ndarray] = None

    def kernel(self, a: int) -> np.ndarray:
        return self.K1 if a == 1 else self.K0

    @property
    def shape(self) -> Tuple[int, int]:
        return self.K0.shape

    def row_means(self, a: int) -> np.ndarray:
        """E[saída | faixa i] com saídas numeradas a partir de 1"""
        K = self.kernel(a)
        return K @ np.arange(1, K.shape[1] + 1)

    def merge_columns(self, mapping: Sequence[int]) -> 'MarkovKernelPair':
        """Agrupa colunas: a coluna j vai para mapping[j] (pós-processamento da saída)"""
        mapping = np.asarray(mapping, dtype=np.int64)
        if mapping.shape != (self.K0.shape[1],) or mapping.min() < 0:
            raise DimensionError("Mapeamento de colunas inválido", "bad_mapping")
        width = int(mapping.max()) + 1
        merge = np.zeros((self.K0.shape[1], width))
        merge[np.arange(mapping.size), mapping] = 1.0
        return MarkovKernelPair(K0=self.K0 @ merge, K1=self.K1 @ merge,
                                parity_residual=self.parity_residual,
                                objective=self.objective, bin_edges=self.bin_edges)

    def validate(self, tol: float = RANDOMIZATION_CONFIG['stochastic_tol']) -> None:
        """Não negatividade, linhas somando 1 e médias não decrescentes"""
        for a in GROUPS:
            K = self.kernel(a)
            if np.any(K < -1e-10):
                raise DomainError(f"K{a} com entradas negativas", "kernel_negative")
            if np.max(np.abs(K.sum(axis=1) - 1.0)) > tol:
                raise DomainError(f"K{a} não é estocástica por linha", "kernel_rows")
            if np.any(np.diff(self.row_means(a)) < -tol):
                raise DomainError(f"K{a} com médias decrescentes", "kernel_monotone")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'K0': self.K0, 'K1': self.K1,
            'parity_residual': self.parity_residual,
            'objective': self.objective,
            'bin_edges': self.bin_edges,
        }


def parity_residual(pmfs: ConditionalPmfSet, K0: np.ndarray, K1: np.ndarray) -> float:
    """max_y ‖f_{y1}K1 - f_{y0}K0‖₁"""
    return float(max(np.abs(pmfs.f[(yv, 1)] @ K1 - pmfs.f[(yv, 0)] @ K0).sum() for yv in GROUPS))


def solve_eo_kernels(pmfs: ConditionalPmfSet, k1: Optional[int] = None,
                     cost: Optional[CostSpec] = None,
                     one_sided: bool = False) -> MarkovKernelPair:
    """Monta e resolve o LP e devolve o par de kernels"""
    k1 = k1 or RANDOMIZATION_CONFIG['k1']
    k = pmfs.k
    operation = debug_logger.start_operation('solve_eo_kernels', {'k': k, 'k1': k1, 'one_sided': one_sided})
    problem = build_eo_lp(pmfs, k1, cost, one_sided=one_sided)
    solution: LpSolution = solve(problem)
    debug_logger.end_operation(operation, solution.status, solution.to_dict())
    if solution.status == STATUS_NUMERICAL:
        raise DomainError(f"LP de randomização sem solução viável dentro da tolerância "
                          f"(violação {solution.max_violation:.3g})", "lp_numerical_error", solution.to_dict())
    if not solution.ok:
        # o LP bilateral sempre admite a solução trivial (todas as linhas iguais)
        raise InfeasibleError(f"LP de randomização terminou com status {solution.status}",
                              "lp_" + solution.status, solution.to_dict())

    x = np.clip(solution.x, 0.0, None)
    K0 = x[:k * k1].reshape(k, k1)
    K1 = x[k * k1:].reshape(k, k1)
    K0 = K0 / K0.sum(axis=1, keepdims=True)
    K1 = K1 / K1.sum(axis=1, keepdims=True)
    pair = MarkovKernelPair(K0=K0, K1=K1, parity_residual=parity_residual(pmfs, K0, K1),
                            objective=solution.objective, bin_edges=pmfs.bin_edges)
    pair.validate()
    logger.info(f"Kernels resolvidos: objetivo={pair.objective:.6g}, "
                f"resíduo de paridade={pair.parity_residual:.3g}")
    return pair


def _sample_rows(K: np.ndarray, rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    cumulative = np.cumsum(K[rows], axis=1)
    cumulative /= cumulative[:, -1:]
    out = (u[:, np.newaxis] >= cumulative).sum(axis=1)
    return np.minimum(out, K.shape[1] - 1)


def apply_kernel(K: np.ndarray, i: int, seed: int) -> int:
    """Sorteia a saída j da linha i de K (determinístico dado o seed)"""
    K = np.asarray(K, dtype=float)
    if not 0 <= i < K.shape[0]:
        raise DomainError(f"Faixa {i} fora de 0..{K.shape[0] - 1}", "bin_out_of_range")
    u = np.random.default_rng(seed).random(1)
    return int(_sample_rows(K, np.array([i]), u)[0])


def apply_kernels(pair: MarkovKernelPair, bins, a, seed: int) -> np.ndarray:
    """
    Saídas randomizadas para vetores de faixas e grupos.

    A linha i usa o gerador semeado por (seed, i): a saída de uma linha não depende
    do conteúdo das demais.
    """
    bins = np.asarray(bins, dtype=np.int64)
    a = data_validator.validate_binary(a, 'a')
    data_validator.validate_same_length(bins, a)
    k = pair.K0.shape[0]
    if bins.size and (bins.min() < 0 or bins.max() >= k):
        raise DomainError(f"Faixas fora de 0..{k - 1}", "bin_out_of_range")
    u = np.array([np.random.default_rng([seed, i]).random() for i in range(bins.shape[0])])
    out = np.empty(bins.shape[0], dtype=np.int64)
    for av in GROUPS:
        mask = a == av
        if mask.any():
            out[mask] = _sample_rows(pair.kernel(av), bins[mask], u[mask])
    return out


def expected_curves(pair: MarkovKernelPair, bin_edges=None) -> pd.DataFrame:
    """Tabela de E[saída | faixa de s, a] para os dois grupos"""
    edges = np.asarray(bin_edges if bin_edges is not None else pair.bin_edges, dtype=float)
    k = pair.K0.shape[0]
    if edges.shape != (k + 1,):
        raise DimensionError(f"bin_edges deve ter {k + 1} valores", "bad_edges")
    rows = []
    for av in GROUPS:
        means = pair.row_means(av)
        for i in range(k):
            rows.append({
                'a': av, 'bin': i + 1,
                's_low': edges[i], 's_high': edges[i + 1],
                's_mid': 0.5 * (edges[i] + edges[i + 1]),
                'expected_output': means[i],
            })
    return pd.DataFrame(rows, columns=['a', 'bin', 's_low', 's_high', 's_mid', 'expected_output'])


def brier_score(probs, outcomes) -> float:
    """Média de (p - y)²"""
    probs = np.asarray(probs, dtype=float)
    data_validator.validate_same_length(probs, outcomes)
    data_validator.validate_probabilities(probs)
    outcomes = data_validator.validate_binary(outcomes, 'outcomes')
    if probs.size == 0:
        raise DomainError("Vetores vazios", "empty_input")
    return float(np.mean((probs - outcomes) ** 2))


# ---------------------------------------------------------------------------
# Modelo do SAT
# ---------------------------------------------------------------------------

class SatModelParams(BaseModel):
    """z | a ~ N(μ_z a, τ_z²); s | a, z ~ N(z + μ_s a, σ_s²); y ~ Bernoulli(p_z(z))"""
    model_config = ConfigDict(frozen=True)

    mu_z: float = SAT_CONFIG['mu_z']
    tau_z: float = Field(default=SAT_CONFIG['tau_z'], gt=0)
    mu_s: float = SAT_CONFIG['mu_s']
    sigma_s: float = Field(default=SAT_CONFIG['sigma_s'], gt=0)
    p_location: float = SAT_CONFIG['p_location']
    p_scale: float = Field(default=SAT_CONFIG['p_scale'], gt=0)

    def p_z(self, z):
        return expit((np.asarray(z, dtype=float) - self.p_location) / self.p_scale)

    def posterior(self, a, s) -> Tuple[np.ndarray, float]:
        """Média e variância de z | a, s"""
        a = np.asarray(a, dtype=float)
        s = np.asarray(s, dtype=float)
        s2, t2 = self.sigma_s ** 2, self.tau_z ** 2
        mean = (s2 * a * self.mu_z + t2 * (s - a * self.mu_s)) / (s2 + t2)
        return mean, s2 * t2 / (s2 + t2)

    def score_law(self, a: int) -> Tuple[float, float]:
        """Média e desvio padrão de s | a"""
        return a * (self.mu_z + self.mu_s), float(np.sqrt(self.tau_z ** 2 + self.sigma_s ** 2))


@dataclass
class SatSample:
    a: np.ndarray
    z: np.ndarray
    s: np.ndarray
    y: np.ndarray

    def __len__(self) -> int:
        return self.a.shape[0]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'a': self.a, 'z': self.z, 's': self.s, 'y': self.y})


def simulate_sat_model(params: SatModelParams, n: int, seed: int) -> SatSample:
    """Amostra (a, z, s, y) com a ~ Bernoulli(1/2)"""
    if n < 1:
        raise DomainError(f"n deve ser >= 1 (recebeu {n})", "bad_n")
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2, size=n)
    z = rng.normal(params.mu_z * a, params.tau_z)
    s = rng.normal(z + params.mu_s * a, params.sigma_s)
    y = (rng.random(n) < params.p_z(z)).astype(np.int64)
    return SatSample(a=a.astype(np.int64), z=z, s=s, y=y)


def bayes_probabilities(params: SatModelParams, a, s,
                        points: int = SAT_CONFIG['quadrature_points']) -> np.ndarray:
    """P(y=1 | a, s) = E[p_z(z) | a, s] por quadratura de Gauss-Hermite"""
    mean, var = params.posterior(a, s)
    nodes, weights = hermgauss(points)
    z = np.asarray(mean, dtype=float)[..., np.newaxis] + np.sqrt(2.0 * var) * nodes
    return params.p_z(z) @ weights / np.sqrt(np.pi)


@dataclass
class _BinMoments:
    mass: np.ndarray      # P(faixa | a)
    outcome: np.ndarray   # P(y=1, faixa | a)
    second: np.ndarray    # E[p(a,s)² ; faixa | a]


def _bin_moments(params: SatModelParams, a: int, bin_edges,
                 points: int = SAT_CONFIG['quadrature_points']) -> _BinMoments:
    """Integra por Gauss-Legendre em cada faixa; as faixas extremas são ilimitadas"""
    edges = np.asarray(bin_edges, dtype=float)
    loc, scale = params.score_law(a)
    lower, upper = edges[:-1].copy(), edges[1:].copy()
    lower[0] = min(loc - 12.0 * scale, upper[0])
    upper[-1] = max(loc + 12.0 * scale, lower[-1])
    nodes, weights = leggauss(points)
    half = 0.5 * (upper - lower)
    s = 0.5 * (upper + lower)[:, np.newaxis] + half[:, np.newaxis] * nodes
    w = half[:, np.newaxis] * weights * stats.norm.pdf(s, loc=loc, scale=scale)
    p = bayes_probabilities(params, np.full(s.shape, a), s, points)
    return _BinMoments(mass=w.sum(axis=1), outcome=(w * p).sum(axis=1), second=(w * p * p).sum(axis=1))


def binned_bayes_probabilities(params: SatModelParams, a: int, bin_edges) -> np.ndarray:
    """P(y=1 | a, s na faixa i) exata"""
    moments = _bin_moments(params, a, bin_edges)
    return moments.outcome / moments.mass


def randomized_probabilities(params: SatModelParams, pair: MarkovKernelPair, a: int,
                             bin_edges=None) -> np.ndarray:
    """P(y=1 | a, saída j) exata para a saída do kernel K_a"""
    edges = bin_edges if bin_edges is not None else pair.bin_edges
    moments = _bin_moments(params, a, edges)
    K = pair.kernel(a)
    mass, outcome = moments.mass @ K, moments.outcome @ K
    with np.errstate(invalid='ignore', divide='ignore'):
        return np.where(mass > 0, outcome / np.where(mass > 0, mass, 1.0), 0.0)


@dataclass
class BrierRow:
    decision: str
    group: int
    expected: float              # Brier populacional exato
    sample: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {'decision': self.decision, 'group': self.group,
                'expected': self.expected, 'sample': self.sample}


def expected_brier(params: SatModelParams, pair: MarkovKernelPair,
                   bin_edges=None) -> List[BrierRow]:
    """
    Brier populacional por grupo das três decisões: Bayes em s, Bayes nas faixas
    e a decisão randomizada. Com massa P e parte positiva Q de cada célula,
    o Brier da probabilidade Q/P é Σ (Q - Q²/P).
    """
    edges = bin_edges if bin_edges is not None else pair.bin_edges
    rows = []
    for av in GROUPS:
        m = _bin_moments(params, av, edges)
        total = m.mass.sum()
        bayes = float((m.outcome - m.second).sum() / total)
        binned = float((m.outcome - m.outcome ** 2 / m.mass).sum() / total)
        K = pair.kernel(av)
        mass, outcome = m.mass @ K, m.outcome @ K
        used = mass > 0
        randomized = float((outcome[used] - outcome[used] ** 2 / mass[used]).sum() / total)
        rows += [BrierRow('bayes', av, bayes), BrierRow('binned_bayes', av, binned),
                 BrierRow('randomized', av, randomized)]
    return rows


def sat_brier_table(params: SatModelParams, sample: SatSample, pmfs: ConditionalPmfSet,
                    pair: MarkovKernelPair, seed: int) -> Tuple[List[BrierRow], pd.DataFrame]:
    """
    Tabela de Brier (esperado e amostral) e a amostra acrescida das
    probabilidades de cada decisão e da saída randomizada.
    """
    rows = expected_brier(params, pair, pmfs.bin_edges)
    bins = pmfs.sample_bins
    if bins is None or bins.shape[0] != len(sample):
        raise DimensionError("pmfs não correspondem à amostra", "pmf_sample_mismatch")

    bayes = bayes_probabilities(params, sample.a, sample.s)
    binned = np.empty(len(sample))
    randomized = np.empty(len(sample))
    outputs = apply_kernels(pair, bins, sample.a, seed)
    for av in GROUPS:
        mask = sample.a == av
        binned[mask] = binned_bayes_probabilities(params, av, pmfs.bin_edges)[bins[mask]]
        randomized[mask] = randomized_probabilities(params, pair, av, pmfs.bin_edges)[outputs[mask]]

    by_decision = {'bayes': bayes, 'binned_bayes': binned, 'randomized': randomized}
    for row in rows:
        mask = sample.a == row.group
        if mask.any():
            row.sample = brier_score(by_decision[row.decision][mask], sample.y[mask])

    frame = sample.to_frame()
    frame['bin'] = bins + 1
    frame['p_bayes'] = bayes
    frame['p_binned'] = binned
    frame['output'] = outputs + 1
    frame['p_randomized'] = randomized
    return rows, frame


# ---------------------------------------------------------------------------
# Randomizador gaussiano
# ---------------------------------------------------------------------------

def _check_psd(S: np.ndarray, name: str) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"{name} deve ser quadrada", "cov_shape")
    if np.max(np.abs(S - S.T), initial=0.0) > 1e-10 * max(np.max(np.abs(S)), 1.0):
        raise DomainError(f"{name} não é simétrica", "cov_not_symmetric")
    S = 0.5 * (S + S.T)
    if np.linalg.eigvalsh(S)[0] < -1e-8 * max(np.trace(S), 1.0):
        raise DomainError(f"{name} não é semidefinida positiva", "cov_not_psd")
    return S


@dataclass
class GaussianScoreModel:
    """s | y, a ~ N(μ_a + A_a y, Σ_a)"""
    mu0: np.ndarray
    mu1: np.ndarray
    A0: np.ndarray
    A1: np.ndarray
    Sigma0: np.ndarray
    Sigma1: np.ndarray

    def __post_init__(self):
        self.mu0 = np.atleast_1d(np.asarray(self.mu0, dtype=float))
        self.mu1 = np.atleast_1d(np.asarray(self.mu1, dtype=float))
        self.A0 = np.atleast_2d(np.asarray(self.A0, dtype=float))
        self.A1 = np.atleast_2d(np.asarray(self.A1, dtype=float))
        self.Sigma0 = _check_psd(np.atleast_2d(self.Sigma0), 'Sigma0')
        self.Sigma1 = _check_psd(np.atleast_2d(self.Sigma1), 'Sigma1')
        d = self.mu0.shape[0]
        shapes_ok = (self.mu1.shape == (d,) and self.A0.shape == self.A1.shape and
                     self.A0.shape[0] == d and self.Sigma0.shape == (d, d) and
                     self.Sigma1.shape == (d, d))
        if not shapes_ok:
            raise DimensionError("Dimensões inconsistentes no modelo gaussiano", "gaussian_shape")
        for name, A in (('A0', self.A0), ('A1', self.A1)):
            if np.linalg.matrix_rank(A) < min(A.shape):
                raise DomainError(f"{name} não tem posto completo", "rank_deficient")

    def params(self, a: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.mu1, self.A1, self.Sigma1) if a == 1 else (self.mu0, self.A0, self.Sigma0)

    def sample_scores(self, a, y, seed: int) -> np.ndarray:
        """Amostra s para vetores de grupos a e respostas y (n × dim y)"""
        a = data_validator.validate_binary(a, 'a')
        y = np.asarray(y, dtype=float).reshape(a.shape[0], -1)
        rng = np.random.default_rng(seed)
        noise = rng.standard_normal((a.shape[0], self.mu0.shape[0]))
        s = np.empty_like(noise)
        for av in GROUPS:
            mu, A, Sigma = self.params(av)
            mask = a == av
            s[mask] = mu + y[mask] @ A.T + noise[mask] @ _psd_factor(Sigma).T
        return s


def _psd_factor(S: np.ndarray) -> np.ndarray:
    """L com L Lᵀ = S para S semidefinida"""
    eigvals, eigvecs = np.linalg.eigh(S)
    return eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))


@dataclass
class GaussianRandomizer:
    """s' = M0 (s - μ0) para a=0 ou s - μ1 para a=1; saída ŷ | a, s ~ N(s', T_a)"""
    M0: np.ndarray
    mu0: np.ndarray
    mu1: np.ndarray
    T0: np.ndarray
    T1: np.ndarray
    D: np.ndarray = field(default=None)

    def transform(self, a: int, s: np.ndarray) -> np.ndarray:
        s = np.atleast_2d(np.asarray(s, dtype=float))
        if a == 1:
            return s - self.mu1
        return (s - self.mu0) @ self.M0.T

    def noise(self, a: int) -> np.ndarray:
        return self.T1 if a == 1 else self.T0


def gaussian_randomizer(model: GaussianScoreModel) -> GaussianRandomizer:
    """
    Randomização mínima que iguala L(ŷ | y, a) entre grupos: depois da
    transformação afim, D = Σ1' - Σ0' é dividida em parte positiva (T0)
    e negativa (T1).
    """
    M0 = model.A1 @ np.linalg.pinv(model.A0)
    sigma0 = M0 @ model.Sigma0 @ M0.T
    D = model.Sigma1 - 0.5 * (sigma0 + sigma0.T)
    D = 0.5 * (D + D.T)
    eigvals, eigvecs = np.linalg.eigh(D)
    positive = np.clip(eigvals, 0.0, None)
    negative = np.clip(-eigvals, 0.0, None)
    T0 = (eigvecs * positive) @ eigvecs.T
    T1 = (eigvecs * negative) @ eigvecs.T
    randomizer = GaussianRandomizer(M0=M0, mu0=model.mu0, mu1=model.mu1,
                                    T0=0.5 * (T0 + T0.T), T1=0.5 * (T1 + T1.T), D=D)
    debug_logger.log_event('gaussian_randomizer', 'Randomizador gaussiano construído', {
        'dim': int(D.shape[0]), 'trace_T0': float(np.trace(T0)), 'trace_T1': float(np.trace(T1)),
    })
    return randomizer


def apply_gaussian_randomizer(randomizer: GaussianRandomizer, a, s, seed: int) -> np.ndarray:
    """ŷ = s' + ruído N(0, T_a), determinístico dado o seed"""
    a = data_validator.validate_binary(a, 'a')
    s = np.asarray(s, dtype=float).reshape(a.shape[0], -1)
    if s.shape[1] != randomizer.M0.shape[0]:
        raise DimensionError(f"s com dimensão {s.shape[1]}, esperado {randomizer.M0.shape[0]}",
                             "gaussian_shape")
    noise = np.random.default_rng(seed).standard_normal(s.shape)
    out = np.empty_like(s)
    for av in GROUPS:
        mask = a == av
        if mask.any():
            out[mask] = randomizer.transform(av, s[mask]) + noise[mask] @ _psd_factor(randomizer.noise(av)).T
    return out
