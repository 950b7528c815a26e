"""
Remoção do subespaço de viés: componentes principais das diferenças entre pares
"""
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Union
import logging

import numpy as np
from sklearn.decomposition import PCA

from ..utils.debug_logger import debug_logger
from ..utils.error_handler import DimensionError, DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BiasSubspace:
    """Base ortonormal d × r do subespaço a remover"""
    basis: np.ndarray
    explained_variance: np.ndarray

    @property
    def r(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def to_dict(self) -> Dict[str, Any]:
        return {'rank': self.r, 'dim': self.dim, 'basis': self.basis.T,
                'explained_variance': self.explained_variance}


def _pair_differences(pairs: Union[np.ndarray, Sequence]) -> np.ndarray:
    try:
        arr = np.asarray(pairs, dtype=float)
    except ValueError:
        raise DimensionError("Pares com vetores de dimensões diferentes", "pair_shape")
    if arr.ndim == 2 and arr.shape[1] == 2:
        arr = arr[:, :, np.newaxis]
    if arr.ndim != 3 or arr.shape[1] != 2:
        raise DimensionError(f"Esperado (m, 2, d) pares, recebeu {arr.shape}", "pair_shape")
    return arr[:, 0, :] - arr[:, 1, :]


def estimate_bias_subspace(pairs, r: int) -> BiasSubspace:
    """
    Cada par (v, w) contribui ±(v - w)/2, isto é, os dois vetores centrados no
    ponto médio do par; o subespaço são as r primeiras componentes principais.

    O conjunto simetrizado tem média zero por construção, então a centragem do
    PCA não altera nada: a base é a dos r primeiros vetores singulares à direita
    das diferenças v - w sem centrar. Uma direção comum a todos os pares (a
    média das diferenças) permanece na base.
    """
    if r < 0:
        raise DomainError(f"Posto deve ser >= 0 (recebeu {r})", "bad_rank")
    diffs = _pair_differences(pairs)
    m, d = diffs.shape
    if m < r:
        raise DomainError(f"São necessários ao menos {r} pares (recebeu {m})", "too_few_pairs")
    if r == 0:
        return BiasSubspace(basis=np.zeros((d, 0)), explained_variance=np.zeros(0))
    rank = int(np.linalg.matrix_rank(diffs)) if m else 0
    if r > rank:
        raise DomainError(f"Posto {r} excede o posto das diferenças ({rank})", "rank_too_large",
                          {'rank': rank})

    symmetric = 0.5 * np.vstack([diffs, -diffs])
    pca = PCA(n_components=r, svd_solver='full')
    pca.fit(symmetric)
    basis, _ = np.linalg.qr(pca.components_.T)
    # qr pode trocar sinais; mantém a orientação das componentes
    basis *= np.sign(np.sum(basis * pca.components_.T, axis=0))
    debug_logger.log_event('bias_subspace', 'Subespaço de viés estimado', {
        'pairs': m, 'dim': d, 'rank': r,
        'explained_variance_ratio': pca.explained_variance_ratio_.tolist(),
    })
    return BiasSubspace(basis=basis, explained_variance=pca.explained_variance_)


def project_out(x, subspace: BiasSubspace) -> np.ndarray:
    """x - B (Bᵀ x), para um vetor ou para as linhas de uma matriz"""
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != subspace.dim:
        raise DimensionError(f"Dimensão {arr.shape[-1]} incompatível com o subespaço ({subspace.dim})",
                             "dimension_mismatch")
    if subspace.r == 0:
        return arr.copy()
    B = subspace.basis
    return arr - (arr @ B) @ B.T
