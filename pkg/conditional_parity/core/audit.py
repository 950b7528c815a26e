"""
Auditorias empíricas de paridade (DP, odds iguais, igualdade de oportunidade, CP)
"""
from typing import Literal, Optional
import logging

import numpy as np

from .cp_test import EpsilonCpResult, epsilon_cp_discrete
from .dataset import DataColumn, Dataset
from ..utils.error_handler import DomainError, UsageError

logger = logging.getLogger(__name__)

AuditMode = Literal['dp', 'eo', 'eopp', 'cp']

# Rótulos aceitos como o resultado "vantajoso" y = 1
ADVANTAGED_LABELS = ('1', '1.0', 'true', 'yes', 'sim')


def as_categorical(col: DataColumn) -> DataColumn:
    """Colunas numéricas unidimensionais viram categóricas pelos valores distintos"""
    if col.kind == 'categorical':
        return col
    if col.values.ndim != 1:
        raise DomainError(f"Coluna '{col.name}' multidimensional não pode ser auditada", "not_categorical")
    return DataColumn.categorical(col.values, name=col.name)


def _advantaged_code(y: DataColumn) -> int:
    labels = [str(level).strip().lower() for level in y.levels]
    for i, label in enumerate(labels):
        if label in ADVANTAGED_LABELS:
            return i
    raise DomainError(f"Coluna '{y.name}' sem o nível y=1", "no_advantaged_level",
                      {'levels': [str(level) for level in y.levels]})


def _subset(col: DataColumn, mask: np.ndarray) -> DataColumn:
    return DataColumn(values=col.values[mask], kind=col.kind, name=col.name, levels=col.levels)


def parity_audit(data: Dataset, x: str, a: str, mode: AuditMode = 'dp',
                 y: Optional[str] = None, z: Optional[str] = None) -> EpsilonCpResult:
    """
    dp: sem condicionamento; eo: condiciona em y; eopp: apenas o estrato y=1;
    cp: condiciona na coluna z.
    """
    x_col, a_col = as_categorical(data[x]), as_categorical(data[a])
    if mode == 'dp':
        return epsilon_cp_discrete(x_col, a_col)
    if mode in ('eo', 'eopp'):
        if not y:
            raise UsageError(f"Modo {mode} exige --y", "missing_y")
        y_col = as_categorical(data[y])
        if mode == 'eo':
            return epsilon_cp_discrete(x_col, a_col, y_col)
        rows = y_col.values == _advantaged_code(y_col)
        if rows.sum() < 2:
            raise DomainError("Menos de duas linhas com y=1", "empty_cell")
        result = epsilon_cp_discrete(_subset(x_col, rows), _subset(a_col, rows))
        result.per_stratum = {f"{y}=1": v for v in result.per_stratum.values()}
        if result.worst_pair:
            result.worst_pair = (f"{y}=1",) + tuple(result.worst_pair[1:])
        return result
    if mode == 'cp':
        if not z:
            raise UsageError("Modo cp exige --z", "missing_z")
        return epsilon_cp_discrete(x_col, a_col, as_categorical(data[z]))
    raise UsageError(f"Modo desconhecido: {mode}", "bad_mode")
