import pytest

from bergmanlab import bergman1


@pytest.fixture(scope="session")
def onb_cache():
    cache = {}

    def get(k):
        if k not in cache:
            cache[k] = bergman1.build_onb(k)
        return cache[k]

    return get


ACCEPTANCE_LINES = {}


def record_criterion(number, passed, detail):
    line = f"CRITERION {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
