import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ioalg.examples import corpus  # noqa: E402


@pytest.fixture(scope="session")
def instances():
    return corpus()


# one summary line per acceptance criterion -------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): test belongs to acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if hasattr(rep, "wasxfail"):
            state = "xfail" if rep.skipped else "failed"
        else:
            state = rep.outcome
        _CRITERIA.setdefault(mark.args[0], []).append((item.name, state))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        states = [s for _, s in _CRITERIA[n]]
        xfails = [name for name, s in _CRITERIA[n] if s == "xfail"]
        if "failed" in states:
            line = "FAIL"
        elif xfails:
            line = f"FAIL (known inherent failures, strict xfail: {', '.join(xfails)})"
        elif all(s == "skipped" for s in states):
            line = "NOT RUN"
        else:
            line = "PASS"
        terminalreporter.write_line(f"criterion {n}: {line} [{len(states)} checks]")
