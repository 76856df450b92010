import logging
import threading
import time

import pytest

from utils.error_handler import (
    EXIT_CHECK_FAILED,
    EXIT_NUMERICAL,
    EXIT_USAGE,
    ConfigurationError,
    ConvergenceError,
    CountingOverflowError,
    ErrorHandler,
    NoCriticalPointError,
    OscNormError,
    PreconditionError,
    ValidationError,
    exit_code_for,
)
from utils.logging_setup import get_logger, setup_logging
from utils.performance import (
    PerformanceMonitor,
    get_performance_monitor,
    monitor_performance,
    ordered_map,
)


class TestLogging:
    def test_child_loggers_reach_stderr(self, capsys):
        setup_logging('INFO')
        get_logger('trigsum').info('gamma converged')
        err = capsys.readouterr().err
        assert 'INFO: oscnorm.trigsum: gamma converged' in err

    def test_level_filters_messages(self, capsys):
        setup_logging('WARNING')
        log = get_logger('schrod')
        log.info('hidden')
        log.warning('shown')
        err = capsys.readouterr().err
        assert 'hidden' not in err
        assert 'shown' in err

    def test_stdout_stays_clean(self, capsys):
        setup_logging('DEBUG')
        get_logger('export').debug('writing rows')
        assert capsys.readouterr().out == ''

    def test_rotating_file(self, tmp_path):
        log_file = tmp_path / 'oscnorm.log'
        root = setup_logging('INFO', str(log_file))
        get_logger('normest').info('restart 3 converged')
        for handler in root.handlers:
            handler.flush()
        assert 'restart 3 converged' in log_file.read_text(encoding='utf-8')

    def test_second_call_lowers_handler_levels(self, capsys):
        setup_logging('WARNING')
        root = setup_logging('DEBUG')
        assert [h.level for h in root.handlers] == [logging.DEBUG]
        get_logger('config').info('level taken from settings file')
        assert 'INFO: oscnorm.config: level taken from settings file' in capsys.readouterr().err

    def test_unknown_level_defaults_to_warning(self):
        assert setup_logging('LOUD').level == logging.WARNING


class TestErrors:
    def test_hierarchy(self):
        assert issubclass(NoCriticalPointError, PreconditionError)
        assert issubclass(PreconditionError, ValidationError)
        assert issubclass(ValidationError, ValueError)
        assert issubclass(ConvergenceError, OscNormError)

    def test_subclasses_are_plain_markers(self):
        for cls in (ValidationError, PreconditionError, NoCriticalPointError, ConvergenceError,
                    CountingOverflowError, ConfigurationError):
            assert '__init__' not in vars(cls)
            assert cls.__doc__
            assert cls('x', error_code='CODE').error_code == 'CODE'

    def test_str_carries_code(self):
        err = ValidationError('N must be positive', error_code='DOMAIN')
        assert str(err) == '[DOMAIN] N must be positive'
        assert err.message == 'N must be positive'
        assert str(OscNormError('plain')) == 'plain'

    @pytest.mark.parametrize(
        'error,code',
        [
            (ValidationError('x'), EXIT_USAGE),
            (PreconditionError('x'), EXIT_USAGE),
            (ConfigurationError('x'), EXIT_USAGE),
            (ConvergenceError('x'), EXIT_NUMERICAL),
            (CountingOverflowError('x'), EXIT_NUMERICAL),
            (OscNormError('x'), EXIT_CHECK_FAILED),
        ],
    )
    def test_exit_codes(self, error, code):
        assert exit_code_for(error) == code


class TestErrorHandler:
    def setup_method(self):
        self.handler = ErrorHandler()

    def test_callbacks_receive_errors(self):
        seen = []
        self.handler.register_error_callback('ConvergenceError', seen.append)
        err = ConvergenceError('panel cap reached', details={'last_values': (1.0, 1.1)})
        assert self.handler.handle_error(err, 'osc_integral', log_error=False) == EXIT_NUMERICAL
        assert seen == [err]

    def test_failing_callback_is_contained(self):
        def boom(_):
            raise RuntimeError('callback failed')

        self.handler.register_error_callback('ValidationError', boom)
        assert self.handler.handle_error(ValidationError('bad q'), log_error=False) == EXIT_USAGE

    def test_classifies_foreign_errors(self):
        assert self.handler.handle_error(ValueError('bad'), log_error=False) == EXIT_USAGE
        assert self.handler.handle_error(ZeroDivisionError('x'), log_error=False) == EXIT_NUMERICAL
        assert self.handler.handle_error(RuntimeError('x'), log_error=False) == EXIT_CHECK_FAILED

    def test_logs_with_context(self, capsys):
        setup_logging('WARNING')
        self.handler.handle_error(ValidationError('q must exceed 1'), context='gamma')
        assert 'gamma: q must exceed 1' in capsys.readouterr().err

    def test_safe_execute(self):
        assert self.handler.safe_execute(lambda a, b: a + b, 2, 3) == 5
        setup_logging('CRITICAL')
        assert self.handler.safe_execute(lambda: 1 / 0, context='division') is None


class TestPerformance:
    def test_timer_and_counters(self):
        monitor = PerformanceMonitor()
        with monitor.timer('scan'):
            time.sleep(0.001)
        monitor.increment_counter('restarts', 3)
        stats = monitor.get_stats()
        assert stats['scan']['count'] == 1
        assert stats['scan']['total'] > 0
        assert stats['restarts'] == {'count': 3}
        monitor.reset()
        assert monitor.get_stats() == {}

    def test_decorator_times_calls(self):
        @monitor_performance('test_square')
        def square(x):
            return x * x

        before = get_performance_monitor().get_stats().get('test_square', {}).get('count', 0)
        assert square(4) == 16
        assert get_performance_monitor().get_stats()['test_square']['count'] == before + 1

    def test_ordered_map_keeps_order(self):
        def slow_identity(x):
            time.sleep(0.001 * (5 - x))
            return x, threading.get_ident()

        results = ordered_map(slow_identity, range(5), workers=3)
        assert [r[0] for r in results] == [0, 1, 2, 3, 4]

    def test_ordered_map_serial(self):
        assert ordered_map(lambda x: x + 1, [3, 1, 2]) == [4, 2, 3]
