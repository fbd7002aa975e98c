import time
from collections import defaultdict
from contextlib import contextmanager

import pytest

_results = defaultdict(list)  # criterion -> [(nodeid, passed, seconds)]


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion k")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _results[mark.args[0]].append((item.nodeid, rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_results):
        rows = _results[k]
        ok = all(p for _, p, _ in rows)
        spent = sum(s for _, _, s in rows)
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} ({len(rows)} checks, {spent:.2f}s)")


@contextmanager
def _limit(seconds):
    start = time.perf_counter()
    yield
    took = time.perf_counter() - start
    assert took <= seconds, f"took {took:.2f}s, limit {seconds}s"


@pytest.fixture
def within():
    """``with within(5): ...`` fails the test if the block runs longer than 5 s."""
    return _limit
