import pytest

from conditional_parity.utils.error_handler import (EXIT_DOMAIN, EXIT_OK, EXIT_PARSE, EXIT_UNEXPECTED,
                                                    EXIT_USAGE, DimensionError, DomainError, ErrorTracker,
                                                    SemSchemaError, UsageError, error_tracker,
                                                    handle_errors)


@pytest.fixture(autouse=True)
def clean_tracker():
    error_tracker.clear_history()
    yield
    error_tracker.clear_history()


def _raising(error):
    @handle_errors
    def command():
        if error is not None:
            raise error
        return EXIT_OK
    return command


def test_exit_codes_follow_error_class():
    assert _raising(None)() == EXIT_OK
    assert _raising(UsageError("flag ausente", "missing_flag"))() == EXIT_USAGE
    assert _raising(SemSchemaError("modelo inválido", [{'line': 3, 'message': 'pmf'}]))() == EXIT_PARSE
    assert _raising(DimensionError("dimensões", "shape"))() == EXIT_DOMAIN
    assert _raising(RuntimeError("falha"))() == EXIT_UNEXPECTED


def test_tracker_counts_handled_errors():
    _raising(UsageError("a"))()
    _raising(UsageError("b"))()
    _raising(KeyError("c"))()
    stats = error_tracker.get_error_stats()
    assert stats['total_errors'] == 3
    assert stats['error_counts'] == {'UsageError': 2, 'KeyError': 1}
    assert stats['recent_errors'][-1]['context'] == {'command': 'command'}


def test_tracker_history_is_bounded():
    tracker = ErrorTracker()
    tracker.max_history = 5
    for i in range(8):
        tracker.track_error(ValueError(str(i)))
    assert len(tracker.error_history) == 5
    assert tracker.error_history[0]['message'] == '3'


def test_domain_errors_are_value_errors():
    assert issubclass(DomainError, ValueError)
    error = SemSchemaError("modelo inválido", [{'line': 4, 'message': "pai 'w' inexistente"}])
    assert "linha 4" in str(error)
    assert error.details['problems'][0]['line'] == 4
