from contextlib import contextmanager

import pytest
from hypothesis import settings

settings.register_profile("suite", max_examples=60, deadline=None)
settings.load_profile("suite")

# One line per acceptance criterion, shown in the terminal summary so
# the verdicts survive pytest's output capture.
_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    @contextmanager
    def criterion(number, name):
        try:
            yield
        except BaseException:
            _ACCEPTANCE_LINES.append(f"criterion {number:02d} {name}: FAIL")
            raise
        _ACCEPTANCE_LINES.append(f"criterion {number:02d} {name}: PASS")

    return criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
