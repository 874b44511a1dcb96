#!/usr/bin/env python3
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from siegel_bounds.utils import temporary_options


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: full acceptance grids that take minutes (deselect with -m "not slow")')


@pytest.fixture(autouse=True)
def restore_options():
    """
    Undo any runtime options that a test changed
    """
    with temporary_options():
        yield
