"""Shared fixtures: an on-disk partial-results cache and opt-in markers.

``SCHOEN_TEST_CACHE`` points the end-to-end tests at a persistent cache
directory (by default a fresh temporary directory per session, so every
number is recomputed).  ``SCHOEN_EXTENDED=1`` enables the long-running
``extended`` tests.
"""

from __future__ import annotations

import os

import pytest

EXTENDED = os.environ.get("SCHOEN_EXTENDED", "") not in ("", "0")


def pytest_collection_modifyitems(config, items):
    if EXTENDED:
        return
    skip = pytest.mark.skip(reason="opt-in: set SCHOEN_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory) -> str:
    path = os.environ.get("SCHOEN_TEST_CACHE")
    if path:
        os.makedirs(path, exist_ok=True)
        return path
    return str(tmp_path_factory.mktemp("partials-cache"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print the acceptance ledger collected by ``test_acceptance``."""
    try:
        from test_acceptance import RESULTS
    except ImportError:  # pragma: no cover - acceptance module not collected
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
