# Ensure the project root is importable during tests
import json
import os
import sys

import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')


@pytest.fixture(scope='session')
def calibrated():
    """Defect constants measured once on fixed scans; tests assert no growth past them."""
    with open(os.path.join(FIXTURES, 'calibrated_constants.json'), encoding='utf-8') as f:
        return json.load(f)


@pytest.fixture(autouse=True)
def _fresh_logging():
    from utils.logging_setup import reset_logging
    from utils.performance import get_performance_monitor

    yield
    reset_logging()
    get_performance_monitor().reset()
