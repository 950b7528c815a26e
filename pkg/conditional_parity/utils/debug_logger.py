"""
Eventos estruturados para acompanhar testes, solver e comandos
"""
import logging
import time
from typing import Any, Dict, Optional


class DebugLogger:
    def __init__(self, name: str):
        self.name = name
        # Filho do logger do pacote: herda os handlers de setup_logging
        self.logger = logging.getLogger(name)
        self._operations: Dict[str, float] = {}

    def log_event(self,
                  event_type: str,
                  message: str,
                  data: Optional[Dict[str, Any]] = None,
                  level: int = logging.DEBUG):
        """
        Registra um evento com dados estruturados

        Args:
            event_type: Tipo do evento (ex: 'kci_result', 'lp_solved')
            message: Mensagem descritiva
            data: Dados adicionais do evento (vão para o campo 'data' do JSON)
            level: Nível de logging
        """
        try:
            self.logger.log(level, f"{event_type}: {message}",
                            extra={'data': {'event_type': event_type, **(data or {})}})
        except Exception as e:
            self.logger.error(f"Erro ao registrar evento: {e}")

    def start_operation(self, operation_name: str, context: Optional[Dict] = None) -> str:
        """Inicia o logging de uma operação e devolve o seu id"""
        operation_id = f"{operation_name}_{len(self._operations)}"
        self._operations[operation_id] = time.perf_counter()
        self.log_event(
            'operation_started',
            f"Iniciando operação: {operation_name}",
            {'operation_id': operation_id, 'context': context or {}}
        )
        return operation_id

    def end_operation(self,
                      operation_id: str,
                      status: str = 'success',
                      result: Optional[Dict] = None):
        """Finaliza o logging de uma operação"""
        started = self._operations.pop(operation_id, None)
        elapsed = time.perf_counter() - started if started is not None else None
        self.log_event(
            'operation_ended',
            f"Finalizando operação: {operation_id}",
            {
                'operation_id': operation_id,
                'status': status,
                'elapsed_seconds': elapsed,
                'result': result or {}
            }
        )


# Instância global para uso em todo o projeto
debug_logger = DebugLogger('conditional_parity.events')
