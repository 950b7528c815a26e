"""
Colunas de dados e ingestão de CSV
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Literal, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import pandas as pd

from ..utils.data_validator import data_validator
from ..utils.error_handler import DomainError, InputParseError

logger = logging.getLogger(__name__)

ColumnKind = Literal['continuous', 'categorical']


@dataclass(frozen=True)
class DataColumn:
    """
    Realizações de uma variável (x, a ou z).

    Contínuas guardam floats com forma (n,) ou (n, d); categóricas guardam
    códigos inteiros 0..L-1 e os rótulos originais em `levels`.
    """
    values: np.ndarray
    kind: ColumnKind = 'continuous'
    name: str = ''
    levels: Tuple = field(default_factory=tuple)

    def __post_init__(self):
        values = np.array(self.values)
        if self.kind == 'continuous':
            values = values.astype(float)
            if not np.all(np.isfinite(values)):
                raise DomainError(f"Coluna '{self.name}': valores ausentes ou não finitos",
                                  "missing_values")
        elif self.kind == 'categorical':
            if values.dtype.kind not in 'iu':
                raise DomainError(f"Coluna '{self.name}': categórica exige códigos inteiros",
                                  "bad_codes")
        else:
            raise DomainError(f"Tipo de coluna desconhecido: {self.kind}", "bad_kind")
        if values.ndim not in (1, 2) or (self.kind == 'categorical' and values.ndim != 1):
            raise DomainError(f"Coluna '{self.name}': forma inválida {values.shape}", "bad_shape")
        if len(values) < 2:
            raise DomainError(f"Coluna '{self.name}': são necessárias ao menos 2 observações",
                              "too_short")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def n_levels(self) -> int:
        return len(self.levels) if self.levels else int(self.values.max()) + 1

    @classmethod
    def categorical(cls, labels: Iterable, name: str = '') -> 'DataColumn':
        """Codifica rótulos arbitrários em ordem de classificação"""
        labels = np.asarray(list(labels))
        levels, codes = np.unique(labels, return_inverse=True)
        return cls(values=codes.astype(np.int64), kind='categorical', name=name,
                   levels=tuple(levels.tolist()))

    @classmethod
    def continuous(cls, values: Iterable, name: str = '') -> 'DataColumn':
        return cls(values=np.asarray(values, dtype=float), kind='continuous', name=name)

    def labels(self) -> np.ndarray:
        """Valores originais (rótulos para categóricas)"""
        if self.kind == 'categorical' and self.levels:
            return np.asarray(self.levels, dtype=object)[self.values]
        return self.values

    def binarize(self, threshold: float) -> 'DataColumn':
        """Substitui a coluna por 1{valor >= limiar} (categórica de dois níveis)"""
        if self.kind != 'continuous' or self.values.ndim != 1:
            raise DomainError(f"Coluna '{self.name}': --binarize-at exige coluna numérica",
                              "binarize_non_numeric")
        codes = (self.values >= threshold).astype(np.int64)
        return DataColumn(values=codes, kind='categorical', name=self.name, levels=(0, 1))


@dataclass
class Dataset:
    """Colunas nomeadas lidas de CSV com cabeçalho"""
    columns: Dict[str, DataColumn]
    frame: pd.DataFrame
    source: str = '<memória>'

    @property
    def n_rows(self) -> int:
        return int(self.frame.shape[0])

    def __getitem__(self, name: str) -> DataColumn:
        data_validator.require_columns(self.columns.keys(), [name])
        return self.columns[name]

    def matrix(self, names: Sequence[str]) -> np.ndarray:
        """Colunas numéricas empilhadas como matriz n×d"""
        data_validator.require_columns(self.columns.keys(), names)
        cols = []
        for name in names:
            col = self.columns[name]
            if col.kind != 'continuous':
                raise DomainError(f"Coluna '{name}' não é numérica", "not_numeric")
            cols.append(col.values)
        return np.column_stack(cols) if cols else np.empty((self.n_rows, 0))

    @classmethod
    def from_frame(cls, frame: pd.DataFrame,
                   categorical: Optional[Iterable[str]] = None,
                   source: str = '<memória>') -> 'Dataset':
        data_validator.validate_frame(frame, source)
        forced = set(categorical or [])
        columns: Dict[str, DataColumn] = {}
        for name in frame.columns:
            raw = frame[name]
            numeric = pd.to_numeric(raw, errors='coerce')
            # Inferência usa a coluna inteira: um único valor não numérico torna-a categórica
            if name not in forced and not numeric.isna().any() and np.all(np.isfinite(numeric)):
                columns[name] = DataColumn.continuous(numeric.to_numpy(dtype=float), name=name)
            else:
                labels = raw.astype(str).to_numpy()
                if name in forced and not numeric.isna().any():
                    # mantém a ordem numérica dos níveis (0 < 1 < 10)
                    labels = numeric.to_numpy()
                columns[name] = DataColumn.categorical(labels, name=name)
        logger.debug(f"Dataset {source}: {frame.shape[0]} linhas, {len(columns)} colunas")
        return cls(columns=columns, frame=frame, source=source)

    @classmethod
    def from_csv(cls, path: Union[str, Path],
                 categorical: Optional[Iterable[str]] = None) -> 'Dataset':
        """Lê CSV UTF-8, vírgula, aspas RFC 4180; campos vazios são ausentes"""
        path = Path(path)
        try:
            frame = pd.read_csv(
                path, sep=',', quotechar='"', dtype=str, encoding='utf-8',
                keep_default_na=False, na_values=[''], skipinitialspace=False,
            )
        except FileNotFoundError:
            raise InputParseError(f"Arquivo não encontrado: {path}", "csv_not_found")
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise InputParseError(f"{path}: CSV inválido ({e})", "csv_parse")
        return cls.from_frame(frame, categorical=categorical, source=str(path))
