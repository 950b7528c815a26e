"""
Gerenciamento centralizado de erros para os testes de paridade condicional
"""
import logging
import traceback
from typing import Optional, Dict, Any, List
from datetime import datetime
from functools import wraps

logger = logging.getLogger(__name__)

# Códigos de saída do runner
EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_DOMAIN = 4


class ParityError(Exception):
    """Classe base para erros do sistema"""
    exit_code = EXIT_UNEXPECTED

    def __init__(self, message: str, error_code: str = "parity_error",
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.error_code = error_code
        self.details = details or {}
        self.timestamp = datetime.now()


class UsageError(ParityError):
    """Flags inválidas, colunas ausentes, papéis ausentes"""
    exit_code = EXIT_USAGE


class InputParseError(ParityError):
    """Falha ao interpretar CSV ou arquivo de modelo"""
    exit_code = EXIT_PARSE


class DomainError(ParityError, ValueError):
    """Entrada bem formada mas inválida para a operação"""
    exit_code = EXIT_DOMAIN


class DimensionError(DomainError):
    """Dimensões incompatíveis entre matrizes ou vetores"""
    pass


class ConfigError(DomainError):
    """Parâmetros de configuração fora do domínio"""
    pass


class EmptyCellError(DomainError):
    """Célula (y, a) ou estrato sem amostras"""
    pass


class InfeasibleError(DomainError):
    """Programa linear sem solução viável"""
    pass


class SemSchemaError(InputParseError):
    """Arquivo de SEM que viola o esquema; guarda as linhas com problema"""

    def __init__(self, message: str, problems: Optional[List[Dict[str, Any]]] = None):
        super().__init__(message, "sem_schema", {'problems': problems or []})
        self.problems = problems or []

    def __str__(self) -> str:
        lines = [super().__str__()]
        for problem in self.problems:
            lines.append(f"  linha {problem.get('line', '?')}: {problem.get('message', '')}")
        return "\n".join(lines)


class ErrorTracker:
    """Rastreia e analisa erros do sistema"""
    def __init__(self):
        self.error_counts: Dict[str, int] = {}
        self.error_history: List[Dict] = []
        self.max_history = 1000

    def track_error(self, error: Exception, context: Optional[Dict] = None):
        """Registra um erro para análise"""
        error_type = type(error).__name__
        self.error_counts[error_type] = self.error_counts.get(error_type, 0) + 1

        error_entry = {
            'type': error_type,
            'message': str(error),
            'code': getattr(error, 'error_code', None),
            'timestamp': datetime.now(),
            'context': context or {},
        }

        self.error_history.append(error_entry)
        if len(self.error_history) > self.max_history:
            self.error_history = self.error_history[-self.max_history:]

    def get_error_stats(self) -> Dict:
        """Retorna estatísticas de erros"""
        return {
            'total_errors': sum(self.error_counts.values()),
            'error_counts': self.error_counts,
            'recent_errors': self.error_history[-10:] if self.error_history else []
        }

    def clear_history(self):
        """Limpa histórico de erros"""
        self.error_counts.clear()
        self.error_history.clear()


def handle_errors(func):
    """
    Decorator que converte exceções de um comando em código de saída.

    ParityError vira o seu exit_code com a mensagem em stderr; qualquer outra
    exceção é registrada com traceback e vira EXIT_UNEXPECTED.
    """
    @wraps(func)
    def wrapper(*args, **kwargs) -> int:
        try:
            return func(*args, **kwargs)
        except ParityError as e:
            error_tracker.track_error(e, {'command': func.__name__})
            logger.error(f"{e.error_code}: {e}")
            if e.details:
                logger.debug(f"Detalhes: {e.details}")
            return e.exit_code
        except Exception as e:
            error_tracker.track_error(e, {'command': func.__name__})
            logger.error(f"Erro não tratado: {e}")
            logger.debug(f"Stack trace: {traceback.format_exc()}")
            return EXIT_UNEXPECTED
    return wrapper


# Instância global do rastreador de erros
error_tracker = ErrorTracker()
