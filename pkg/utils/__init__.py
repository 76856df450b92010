from .error_handler import OscNormError, get_error_handler  # noqa: F401
from .logging_setup import get_logger, setup_logging  # noqa: F401
from .performance import get_performance_monitor, monitor_performance  # noqa: F401

__all__ = [
    'OscNormError',
    'get_error_handler',
    'get_logger',
    'setup_logging',
    'get_performance_monitor',
    'monitor_performance',
]
