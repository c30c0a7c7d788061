import pytest

from breakaway.friction import FrictionParams

ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def params():
    return FrictionParams()


@pytest.fixture
def record(request):
    """Collect one (criterion, passed, detail) line for the acceptance summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def _record(criterion, passed, detail):
        lines.append((criterion, bool(passed), detail))
        print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}")

    return _record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(lines, key=lambda item: item[0]):
        terminalreporter.write_line(f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}")
