"""
Validador dos dados de entrada (CSV, colunas, probabilidades)
"""
from typing import Any, Iterable, Sequence
import numpy as np
import pandas as pd
from pydantic import ValidationError

from .debug_logger import debug_logger
from .error_handler import ConfigError, DimensionError, DomainError, InputParseError, UsageError


class DataValidator:
    def __init__(self):
        # Limites de validação
        self.limits = {
            'min_rows': 2,
            'prob_tol': 0.0,
        }

    def validate_frame(self, frame: pd.DataFrame, source: str = '<csv>') -> None:
        """Valida tabela lida de CSV: cabeçalho, linhas mínimas, sem ausentes"""
        if frame.shape[1] == 0:
            raise InputParseError(f"{source}: cabeçalho ausente ou vazio", "csv_header")

        if any(str(c).startswith('Unnamed:') or str(c).strip() == '' for c in frame.columns):
            raise InputParseError(f"{source}: cabeçalho com coluna sem nome", "csv_header")

        if frame.shape[0] < self.limits['min_rows']:
            raise InputParseError(
                f"{source}: são necessárias ao menos {self.limits['min_rows']} linhas",
                "csv_rows", {'rows': int(frame.shape[0])}
            )

        missing = frame.isna()
        if missing.values.any():
            row, col = np.argwhere(missing.values)[0]
            debug_logger.log_event(
                'validation_error',
                'Valores ausentes no CSV',
                {'source': source, 'count': int(missing.values.sum())}
            )
            # +2: linha 1 é o cabeçalho
            raise InputParseError(
                f"{source}: valor ausente na linha {int(row) + 2}, coluna '{frame.columns[col]}'",
                "csv_missing", {'line': int(row) + 2, 'column': str(frame.columns[col])}
            )

    def require_columns(self, available: Iterable[str], requested: Sequence[str]) -> None:
        """Garante que as colunas pedidas existem"""
        available = set(available)
        missing = [c for c in requested if c not in available]
        if missing:
            raise UsageError(
                f"Colunas inexistentes: {', '.join(missing)}",
                "missing_columns", {'missing': missing}
            )

    def validate_same_length(self, *arrays: Any) -> int:
        """Todas as entradas devem ter o mesmo número de linhas"""
        lengths = {len(a) for a in arrays}
        if len(lengths) != 1:
            raise DimensionError(
                f"Comprimentos diferentes: {sorted(lengths)}", "length_mismatch"
            )
        return lengths.pop()

    def validate_probabilities(self, probs: np.ndarray) -> None:
        """Probabilidades finitas em [0, 1]"""
        if not np.all(np.isfinite(probs)) or np.any(probs < 0.0) or np.any(probs > 1.0):
            raise DomainError("Probabilidades fora de [0, 1]", "prob_range")

    def validate_binary(self, values: np.ndarray, name: str = 'valor') -> np.ndarray:
        """Converte para inteiros {0, 1}, recusando outros valores"""
        arr = np.asarray(values)
        if arr.dtype.kind in 'fc':
            if not np.all(np.isin(arr, (0.0, 1.0))):
                raise DomainError(f"{name} deve ser binário (0/1)", "not_binary")
            return arr.astype(int)
        try:
            as_int = arr.astype(int)
        except (TypeError, ValueError):
            raise DomainError(f"{name} deve ser binário (0/1)", "not_binary")
        if not np.all(np.isin(as_int, (0, 1))):
            raise DomainError(f"{name} deve ser binário (0/1)", "not_binary")
        return as_int

    def validate_pmf(self, pmf: np.ndarray, tol: float = 1e-12, name: str = 'pmf') -> None:
        """Vetor de probabilidades não negativo que soma 1"""
        pmf = np.asarray(pmf, dtype=float)
        if pmf.ndim != 1 or pmf.size == 0:
            raise DomainError(f"{name}: vetor vazio ou não unidimensional", "pmf_shape")
        if np.any(pmf < 0) or abs(pmf.sum() - 1.0) > tol:
            raise DomainError(
                f"{name}: deve ser não negativa e somar 1 (soma={pmf.sum():.15g})",
                "pmf_invalid"
            )

    def build_model(self, model_cls: Any, **values: Any) -> Any:
        """Instancia um modelo pydantic; ValidationError vira ConfigError"""
        try:
            return model_cls(**values)
        except ValidationError as e:
            problems = [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()]
            raise ConfigError(
                f"{model_cls.__name__} inválido: {'; '.join(problems)}",
                "invalid_config", {'errors': problems}
            )


# Instância global do validador
data_validator = DataValidator()
