"""Exception hierarchy and centralized error handling for oscnorm."""

from __future__ import annotations

from typing import Any, Callable

from .logging_setup import get_logger

logger = get_logger('error_handler')

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class OscNormError(Exception):
    """Base exception for oscnorm errors."""

    def __init__(
        self,
        message: str,
        error_code: str | None = None,
        details: dict[str, Any] | None = None,
    ):
        super().__init__(message)
        self.message = message
        self.error_code = error_code
        self.details = details or {}

    def __str__(self) -> str:
        return f"[{self.error_code}] {self.message}" if self.error_code else self.message


class ValidationError(OscNormError, ValueError):
    """Argument outside the domain of an operation."""

    pass


class PreconditionError(ValidationError):
    """A checked analytic precondition does not hold."""

    pass


class NoCriticalPointError(PreconditionError):
    """The phase derivative has no sign change on the interval."""

    pass


class ConvergenceError(OscNormError, ArithmeticError):
    """Refinement hit its cap before reaching the requested tolerance."""

    pass


class CountingOverflowError(OscNormError, OverflowError):
    """Exact integer counting needs a wider integer than 64 bits."""

    pass


class ConfigurationError(OscNormError):
    """Unreadable or inconsistent numerics configuration."""

    pass


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit code."""
    if isinstance(error, (ValidationError, ConfigurationError)):
        return EXIT_USAGE
    if isinstance(error, (ConvergenceError, CountingOverflowError)):
        return EXIT_NUMERICAL
    return EXIT_CHECK_FAILED


class ErrorHandler:
    """Classifies, logs and dispatches errors raised while running a command."""

    def __init__(self) -> None:
        self._error_callbacks: dict[str, list[Callable[[OscNormError], None]]] = {}

    def register_error_callback(
        self, error_type: str, callback: Callable[[OscNormError], None]
    ) -> None:
        """Register a callback for an error class name (e.g. 'ConvergenceError')."""
        self._error_callbacks.setdefault(error_type, []).append(callback)

    def handle_error(self, error: Exception, context: str = "", log_error: bool = True) -> int:
        """Handle an error and return the exit code it maps to."""
        osc_error = error if isinstance(error, OscNormError) else self._classify_error(error)

        if log_error:
            self._log_error(osc_error, context)

        for callback in self._error_callbacks.get(type(osc_error).__name__, []):
            try:
                callback(osc_error)
            except Exception as cb_error:
                logger.error(f"Error in callback: {cb_error}")

        return exit_code_for(osc_error)

    def _classify_error(self, error: Exception) -> OscNormError:
        """Wrap a foreign exception into the oscnorm hierarchy."""
        error_msg = str(error)
        error_type = type(error).__name__

        if isinstance(error, (FloatingPointError, ZeroDivisionError)):
            return ConvergenceError(f"{error_type}: {error_msg}", error_code='FLOAT')
        if isinstance(error, (ValueError, TypeError)):
            return ValidationError(f"{error_type}: {error_msg}", error_code='ARG')
        if isinstance(error, (OSError, KeyError)) and 'config' in error_msg.lower():
            return ConfigurationError(f"{error_type}: {error_msg}")
        return OscNormError(f"{error_type}: {error_msg}")

    def _log_error(self, error: OscNormError, context: str) -> None:
        log_msg = f"{context}: {error}" if context else str(error)

        if isinstance(error, ValidationError):
            logger.warning(log_msg)
        else:
            logger.error(log_msg)

        if error.details:
            logger.debug(f"Error details: {error.details}")

    def safe_execute(self, func: Callable, *args, context: str = "", **kwargs) -> Any:
        """Execute a function, routing any exception through handle_error()."""
        try:
            return func(*args, **kwargs)
        except Exception as e:
            self.handle_error(e, context)
            return None


_error_handler = ErrorHandler()


def get_error_handler() -> ErrorHandler:
    return _error_handler
