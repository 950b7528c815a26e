"""
Kernels, matrizes de Gram e álgebra linear compartilhada pelo teste de paridade
"""
from dataclasses import dataclass
from typing import Literal, Optional, Tuple, Union
import logging

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .dataset import DataColumn
from ..config import NUMERIC_CONFIG
from ..utils.error_handler import DimensionError, DomainError

logger = logging.getLogger(__name__)

KernelKind = Literal['rbf', 'delta']
ArrayLike = Union[np.ndarray, list, tuple]


@dataclass(frozen=True)
class KernelSpec:
    """Kernel positivo definido: rbf (com largura de banda) ou delta"""
    kind: KernelKind = 'rbf'
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.kind not in ('rbf', 'delta'):
            raise DomainError(f"Kernel desconhecido: {self.kind}", "bad_kernel")
        if self.kind == 'rbf' and not (np.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise DomainError(f"Largura de banda deve ser positiva: {self.bandwidth}",
                              "bad_bandwidth")


@dataclass(frozen=True)
class GramMatrix:
    """
    Matriz de Gram n×n simétrica.

    `source` guarda a Gram não centrada da qual uma Gram centrada foi obtida;
    o produto K_{x,z} é formado a partir dela.
    """
    entries: np.ndarray
    centered: bool = False
    source: Optional[np.ndarray] = None

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionError(f"Gram deve ser quadrada, recebeu {entries.shape}", "gram_shape")
        scale = np.max(np.abs(entries)) if entries.size else 0.0
        if np.max(np.abs(entries - entries.T), initial=0.0) > NUMERIC_CONFIG['symmetry_tol'] * max(scale, 1e-300):
            raise DomainError("Gram não simétrica", "gram_not_symmetric")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def uncentered(self) -> np.ndarray:
        """Gram original (não centrada) quando disponível"""
        if not self.centered:
            return self.entries
        if self.source is None:
            raise DomainError("Gram centrada sem matriz de origem", "gram_no_source")
        return self.source

    def is_psd(self) -> bool:
        """Menor autovalor >= -1e-8 * traço"""
        eigvals = np.linalg.eigvalsh(self.entries)
        return bool(eigvals[0] >= -NUMERIC_CONFIG['psd_tol'] * max(np.trace(self.entries), 0.0))


def kernel_eval(spec: KernelSpec, u, v) -> float:
    """Avalia k(u, v) para um par de observações"""
    if spec.kind == 'rbf':
        try:
            diff = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
        except (TypeError, ValueError):
            raise DomainError("Kernel rbf exige valores contínuos", "kernel_kind_mismatch")
        return float(np.exp(-np.sum(diff * diff) / (2.0 * spec.bandwidth ** 2)))
    if isinstance(u, float) or isinstance(v, float):
        if not (float(u).is_integer() and float(v).is_integer()):
            raise DomainError("Kernel delta exige códigos categóricos", "kernel_kind_mismatch")
    return 1.0 if np.array_equal(np.asarray(u), np.asarray(v)) else 0.0


def _as_points(values: np.ndarray) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    return arr[:, np.newaxis] if arr.ndim == 1 else arr


def median_bandwidth(values: Union[DataColumn, ArrayLike]) -> float:
    """Heurística da mediana: mediana das distâncias euclidianas entre pares"""
    raw = values.values if isinstance(values, DataColumn) else values
    points = _as_points(raw)
    if points.shape[0] < 2:
        return 1.0
    dists = pdist(points, metric='euclidean')
    median = float(np.median(dists))
    if not np.isfinite(median) or median <= 0.0:
        # maioria de pares empatados (colunas quase constantes ou binárias)
        positive = dists[dists > 0]
        median = float(np.median(positive)) if positive.size else 1.0
    return median


def default_kernel(col: DataColumn) -> KernelSpec:
    """Categóricas usam delta; contínuas usam rbf com a heurística da mediana"""
    if col.kind == 'categorical':
        return KernelSpec(kind='delta')
    return KernelSpec(kind='rbf', bandwidth=median_bandwidth(col))


def gram(col: Union[DataColumn, ArrayLike], spec: Optional[KernelSpec] = None) -> GramMatrix:
    """[G]_{ij} = k(col_i, col_j)"""
    if isinstance(col, DataColumn):
        spec = spec or default_kernel(col)
        if spec.kind == 'rbf' and col.kind != 'continuous':
            raise DomainError(f"Kernel rbf em coluna categórica '{col.name}'", "kernel_kind_mismatch")
        if spec.kind == 'delta' and col.kind != 'categorical':
            raise DomainError(f"Kernel delta em coluna contínua '{col.name}'", "kernel_kind_mismatch")
        values = col.values
    else:
        values = np.asarray(col)
        spec = spec or KernelSpec(kind='rbf', bandwidth=median_bandwidth(values))
    if len(values) == 0:
        raise DomainError("Coluna vazia", "empty_column")

    if spec.kind == 'rbf':
        points = _as_points(values)
        sq = cdist(points, points, metric='sqeuclidean')
        entries = np.exp(-sq / (2.0 * spec.bandwidth ** 2))
    else:
        codes = np.asarray(values)
        if codes.ndim == 1:
            entries = (codes[:, np.newaxis] == codes[np.newaxis, :]).astype(float)
        else:
            entries = np.all(codes[:, np.newaxis, :] == codes[np.newaxis, :, :], axis=2).astype(float)
    return GramMatrix(entries=entries, centered=False)


def centering_matrix(n: int) -> np.ndarray:
    """M_n = I - (1/n) 11'"""
    return np.eye(n) - np.full((n, n), 1.0 / n)


def center(G: GramMatrix) -> GramMatrix:
    """K = M_n G M_n (idempotente)"""
    if G.centered:
        return G
    entries = G.entries
    row_means = entries.mean(axis=1, keepdims=True)
    col_means = entries.mean(axis=0, keepdims=True)
    K = entries - row_means - col_means + entries.mean()
    K = 0.5 * (K + K.T)
    return GramMatrix(entries=K, centered=True, source=G.entries)


def hadamard(K1: GramMatrix, K2: GramMatrix) -> GramMatrix:
    """Produto entrada a entrada"""
    if K1.entries.shape != K2.entries.shape:
        raise DimensionError(
            f"Dimensões incompatíveis: {K1.entries.shape} e {K2.entries.shape}", "dimension_mismatch"
        )
    return GramMatrix(entries=K1.entries * K2.entries, centered=False)


def joint_gram(Kx: GramMatrix, Kz: GramMatrix) -> GramMatrix:
    """
    K_{x,z}: Gram do kernel produto k_x·k_z, centrada.

    Usa as Gram não centradas, de modo que z constante (G_z = 11') devolve K_x.
    """
    Gx = GramMatrix(entries=Kx.uncentered())
    Gz = GramMatrix(entries=Kz.uncentered())
    return center(hadamard(Gx, Gz))


def sym_eig(S: Union[np.ndarray, GramMatrix]) -> Tuple[np.ndarray, np.ndarray]:
    """Autovalores em ordem decrescente e autovetores ortonormais (colunas)"""
    S = S.entries if isinstance(S, GramMatrix) else np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"Matriz deve ser quadrada, recebeu {S.shape}", "eig_shape")
    scale = np.max(np.abs(S)) if S.size else 0.0
    if np.max(np.abs(S - S.T), initial=0.0) > NUMERIC_CONFIG['symmetry_tol'] * max(scale, 1e-300) * 1e2:
        raise DomainError("sym_eig exige matriz simétrica", "eig_not_symmetric")
    eigvals, eigvecs = np.linalg.eigh(0.5 * (S + S.T))
    order = np.argsort(eigvals)[::-1]
    return eigvals[order], eigvecs[:, order]


def pinv_sym(S: np.ndarray) -> np.ndarray:
    """Pseudo-inversa de matriz simétrica via autodecomposição (corte n·eps·max|λ|)"""
    eigvals, eigvecs = sym_eig(S)
    n = S.shape[0]
    cutoff = n * np.finfo(float).eps * (np.max(np.abs(eigvals)) if eigvals.size else 0.0)
    keep = np.abs(eigvals) > cutoff
    inv = (eigvecs[:, keep] / eigvals[keep]) @ eigvecs[:, keep].T
    return 0.5 * (inv + inv.T)


def reg_pinv(K: GramMatrix, lam: float) -> np.ndarray:
    """(K + λ M_n)† para K centrada"""
    if not K.centered:
        raise DomainError("reg_pinv exige Gram centrada", "not_centered")
    if not lam > 0:
        raise DomainError(f"λ deve ser positivo: {lam}", "bad_lambda")
    return pinv_sym(K.entries + lam * centering_matrix(K.n))
