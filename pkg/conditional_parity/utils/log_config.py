import logging
import logging.handlers
import os
import sys
import socket
import uuid
from pathlib import Path
from datetime import datetime
import json
from typing import Optional, Union


class JsonFormatter(logging.Formatter):
    """Formatador personalizado para logs em JSON com mais contexto"""
    def __init__(self):
        super().__init__()
        self.hostname = socket.gethostname()
        self.process = os.getpid()
        self.correlation_id = str(uuid.uuid4())

    def format(self, record):
        log_obj = {
            'timestamp': datetime.fromtimestamp(record.created).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
            'message': record.getMessage(),
            'hostname': self.hostname,
            'process': self.process,
            'correlation_id': self.correlation_id,
            'data': record.__dict__.get('data', {})  # dados adicionais via extra={'data': ...}
        }

        if record.exc_info:
            log_obj['exception'] = {
                'type': record.exc_info[0].__name__ if record.exc_info[0] else 'None',
                'message': str(record.exc_info[1]),
                'traceback': self.formatException(record.exc_info)
            }

        return json.dumps(log_obj, default=str)


LOG_LEVELS = {
    'debug': logging.DEBUG,
    'info': logging.INFO,
    'warning': logging.WARNING,
    'error': logging.ERROR,
    'critical': logging.CRITICAL
}


def setup_logging(name: str = "conditional_parity",
                  log_file: Optional[Union[str, Path]] = None,
                  level: str = "warning",
                  max_bytes: int = 10 * 1024 * 1024,
                  backup_count: int = 5) -> logging.Logger:
    """
    Configura o logging do pacote.

    Console sempre em stderr (stdout fica reservado para os relatórios JSON).
    O arquivo JSON com rotação só é criado quando log_file é informado.
    """
    package_logger = logging.getLogger(name)
    package_logger.setLevel(logging.DEBUG)
    package_logger.propagate = False

    # Remove handlers antigos (reconfiguração entre comandos/testes)
    for handler in package_logger.handlers[:]:
        package_logger.removeHandler(handler)
        handler.close()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(
        logging.Formatter('%(asctime)s | %(levelname)-8s | %(name)s | %(message)s')
    )
    console_handler.setLevel(LOG_LEVELS.get(str(level).lower(), logging.WARNING))
    package_logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            str(log_path),
            maxBytes=max_bytes,
            backupCount=backup_count,
            encoding='utf-8'
        )
        file_handler.setFormatter(JsonFormatter())
        file_handler.setLevel(logging.DEBUG)
        package_logger.addHandler(file_handler)

    # Bibliotecas numéricas costumam ser verbosas em DEBUG
    logging.getLogger('matplotlib').setLevel(logging.WARNING)
    logging.getLogger('numba').setLevel(logging.WARNING)

    return package_logger


__all__ = ['setup_logging', 'LOG_LEVELS', 'JsonFormatter']
