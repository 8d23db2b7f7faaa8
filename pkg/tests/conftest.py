import time
from contextlib import contextmanager

import pytest

_CRITERIA = {}


class Budget:
    def __init__(self, number, title, seconds):
        self.number, self.title, self.seconds = number, title, seconds
        self.elapsed = None
        self.detail = ""


@pytest.fixture
def criterion(request):
    """Time an acceptance criterion and fail it if it overruns its budget."""
    marker = request.node.get_closest_marker("criterion")
    number, title, seconds = marker.args
    budget = Budget(number, title, seconds)
    _CRITERIA[request.node.nodeid] = budget

    @contextmanager
    def timed():
        start = time.perf_counter()
        yield budget
        budget.elapsed = time.perf_counter() - start
        assert budget.elapsed < seconds, f"took {budget.elapsed:.2f}s, budget {seconds}s"

    return timed


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, seconds): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    outcome = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.nodeid in _CRITERIA and (rep.when == "call" or key != "passed"):
                outcome[rep.nodeid] = "PASS" if key == "passed" else "FAIL"
    terminalreporter.section("acceptance criteria")
    for nodeid, b in sorted(_CRITERIA.items(), key=lambda kv: kv[1].number):
        took = f"{b.elapsed:.2f}s" if b.elapsed is not None else "n/a"
        status = outcome.get(nodeid, "FAIL")
        line = f"[{status}] {b.number:>2}. {b.title} ({took} of {b.seconds}s)"
        if b.detail:
            line += f": {b.detail}"
        terminalreporter.write_line(line)
