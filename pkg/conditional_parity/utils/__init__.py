from .error_handler import (
    ParityError,
    UsageError,
    InputParseError,
    DomainError,
    DimensionError,
    ConfigError,
    EmptyCellError,
    InfeasibleError,
    SemSchemaError,
    handle_errors,
    error_tracker
)
from .debug_logger import debug_logger
from .log_config import setup_logging
